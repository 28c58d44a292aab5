#pragma once

#include <filesystem>

namespace CLI {
class App;
}

namespace fulfil::cli {

/// Templates, fixture instance, prompts and the OOD pool live under this
/// directory. FULFIL_DATA_ROOT overrides the build-time default.
std::filesystem::path data_root();

/// Each adds options and a callback to `app`, which may be the top-level
/// app or a subcommand.
void setup_gen(CLI::App& app);
void setup_eval(CLI::App& app);
void setup_serve(CLI::App& app);

}  // namespace fulfil::cli
