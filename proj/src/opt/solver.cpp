#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include "fulfil/opt/model.hpp"

namespace fulfil::opt {

namespace {

using core::Demand;
using core::PlanLine;
using core::Week;

struct Option {
  PlanLine line;
  int slot = 0;       // supplier_index * num_weeks + ship_week
  int lex_rank = 0;   // rank by (supplier id, method name, ship week) within the demand
};

class Search {
 public:
  Search(const Instance& instance, std::span<const Constraint> constraints)
      : instance_(instance) {
    const int weeks = instance.horizon.num_weeks;
    capacity_.assign(instance.suppliers.size() * weeks, 0);
    for (const auto& rec : instance.inventory) {
      if (rec.week < 0 || rec.week >= weeks) continue;
      for (std::size_t s = 0; s < instance.suppliers.size(); ++s) {
        if (instance.suppliers[s].id == rec.supplier_id) capacity_[s * weeks + rec.week] += rec.quantity;
      }
    }

    // Demand-id order defines the tie-break key layout.
    std::vector<std::size_t> by_id(instance.demands.size());
    std::iota(by_id.begin(), by_id.end(), 0);
    std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) {
      return instance.demands[a].id < instance.demands[b].id;
    });
    key_pos_.resize(by_id.size());
    for (std::size_t k = 0; k < by_id.size(); ++k) key_pos_[by_id[k]] = k;

    order_.resize(instance.demands.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      const Demand& da = instance.demands[a];
      const Demand& db = instance.demands[b];
      if (da.racks != db.racks) return da.racks > db.racks;
      return da.id < db.id;
    });

    options_.resize(instance.demands.size());
    for (std::size_t d = 0; d < instance.demands.size(); ++d) {
      const Demand& demand = instance.demands[d];
      auto& opts = options_[d];
      for (std::size_t s = 0; s < instance.suppliers.size(); ++s) {
        for (const auto& method : instance.methods) {
          for (Week w = 0; w < weeks; ++w) {
            int slot = static_cast<int>(s * weeks + w);
            if (capacity_[slot] < demand.racks) continue;
            PlanLine line =
                core::make_line(demand, instance.suppliers[s], method, w, instance.cost);
            bool ok = std::all_of(constraints.begin(), constraints.end(), [&](const Constraint& c) {
              return core::line_admissible(c, line, instance.horizon);
            });
            if (ok) opts.push_back(Option{std::move(line), slot, 0});
          }
        }
      }
      auto lex = [](const Option& a, const Option& b) {
        return std::tie(a.line.supplier_id, a.line.method, a.line.ship_week) <
               std::tie(b.line.supplier_id, b.line.method, b.line.ship_week);
      };
      std::sort(opts.begin(), opts.end(), lex);
      for (std::size_t i = 0; i < opts.size(); ++i) opts[i].lex_rank = static_cast<int>(i);
      std::stable_sort(opts.begin(), opts.end(),
                       [](const Option& a, const Option& b) { return a.line.line_cost < b.line.line_cost; });
    }

    suffix_bound_.assign(order_.size() + 1, Fixed{});
    for (std::size_t k = order_.size(); k-- > 0;) {
      const auto& opts = options_[order_[k]];
      suffix_bound_[k] = suffix_bound_[k + 1] + (opts.empty() ? Fixed{} : opts.front().line.line_cost);
    }
    suffix_racks_.assign(order_.size() + 1, 0);
    for (std::size_t k = order_.size(); k-- > 0;) {
      suffix_racks_[k] = suffix_racks_[k + 1] + instance.demands[order_[k]].racks;
    }
  }

  SolveOutcome run() {
    SolveOutcome out;
    bool any_empty = std::any_of(options_.begin(), options_.end(),
                                 [](const auto& o) { return o.empty(); });
    if (!any_empty) {
      chosen_.assign(order_.size(), nullptr);
      remaining_capacity_ = std::accumulate(capacity_.begin(), capacity_.end(), std::int64_t{0});
      descend(0, Fixed{});
    }
    out.nodes_explored = nodes_;
    if (!best_cost_) return out;

    Plan plan;
    for (std::size_t d = 0; d < instance_.demands.size(); ++d) {
      plan.lines.push_back(best_[d]);
      plan.total_cost += best_[d].line_cost;
    }
    out.feasible = true;
    out.objective = plan.total_cost;
    out.assignment = std::move(plan);
    return out;
  }

 private:
  void descend(std::size_t depth, Fixed partial) {
    ++nodes_;
    if (best_cost_ && partial + suffix_bound_[depth] > *best_cost_) return;
    if (suffix_racks_[depth] > remaining_capacity_) return;
    if (depth == order_.size()) {
      consider_leaf(partial);
      return;
    }
    const std::size_t d = order_[depth];
    const int racks = instance_.demands[d].racks;
    for (const Option& opt : options_[d]) {
      if (best_cost_ && partial + opt.line.line_cost + suffix_bound_[depth + 1] > *best_cost_) {
        break;  // options are cost-sorted
      }
      if (capacity_[opt.slot] < racks) continue;
      capacity_[opt.slot] -= racks;
      remaining_capacity_ -= racks;
      chosen_[depth] = &opt;
      descend(depth + 1, partial + opt.line.line_cost);
      capacity_[opt.slot] += racks;
      remaining_capacity_ += racks;
    }
  }

  void consider_leaf(Fixed cost) {
    std::vector<int> key(order_.size());
    for (std::size_t k = 0; k < order_.size(); ++k) key[key_pos_[order_[k]]] = chosen_[k]->lex_rank;
    if (best_cost_ && (cost > *best_cost_ || (cost == *best_cost_ && key >= best_key_))) return;
    best_cost_ = cost;
    best_key_ = std::move(key);
    best_.assign(instance_.demands.size(), PlanLine{});
    for (std::size_t k = 0; k < order_.size(); ++k) best_[order_[k]] = chosen_[k]->line;
  }

  const Instance& instance_;
  std::vector<std::int64_t> capacity_;
  std::int64_t remaining_capacity_ = 0;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> key_pos_;
  std::vector<std::vector<Option>> options_;
  std::vector<Fixed> suffix_bound_;
  std::vector<std::int64_t> suffix_racks_;

  std::vector<const Option*> chosen_;
  std::optional<Fixed> best_cost_;
  std::vector<int> best_key_;
  std::vector<PlanLine> best_;
  long nodes_ = 0;
};

}  // namespace

SolveOutcome solve(const Instance& instance, std::span<const Constraint> constraints) {
  return Search(instance, constraints).run();
}

}  // namespace fulfil::opt
