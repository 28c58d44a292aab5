#include "fulfil/dsl/world.hpp"

#include "fulfil/core/instance_io.hpp"

namespace fulfil::dsl {

World::World(std::shared_ptr<const core::Instance> instance)
    : store(std::make_shared<const query::TableStore>(query::TableStore::from_instance(*instance))),
      model(std::move(instance)) {}

World load_world(const std::filesystem::path& dir, std::optional<core::Date> now_override) {
  return World(std::make_shared<const core::Instance>(core::load_instance(dir, now_override)));
}

}  // namespace fulfil::dsl
