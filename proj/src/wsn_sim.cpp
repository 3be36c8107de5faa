#include "wsnsel/wsn_sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "wsnsel/errors.hpp"
#include "wsnsel/format.hpp"

namespace wsnsel {

std::string_view to_string(node_state state) {
  switch (state) {
    case node_state::active: return "active";
    case node_state::sleep: return "sleep";
    case node_state::sink: return "sink";
  }
  return "?";
}

node_state routing_plan::state_of(sensor_id id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const field_node& n, sensor_id v) { return n.mote_id < v; });
  if (it == nodes.end() || it->mote_id != id) throw contract_error("node " + std::to_string(id) + " not in plan");
  return it->state;
}

routing_plan build_routing(const std::vector<sensor_position>& positions, const std::vector<sensor_id>& active_ids,
                           sensor_id sink_id, double radio_range) {
  if (!(radio_range > 0.0)) throw contract_error("radio range must be positive");

  routing_plan plan;
  plan.sink_id = sink_id;
  plan.radio_range = radio_range;
  for (const auto& p : positions) plan.nodes.push_back({p.mote_id, p.x, p.y, node_state::sleep});
  std::sort(plan.nodes.begin(), plan.nodes.end(),
            [](const field_node& a, const field_node& b) { return a.mote_id < b.mote_id; });

  auto find = [&](sensor_id id) -> field_node* {
    auto it = std::lower_bound(plan.nodes.begin(), plan.nodes.end(), id,
                               [](const field_node& n, sensor_id v) { return n.mote_id < v; });
    return it != plan.nodes.end() && it->mote_id == id ? &*it : nullptr;
  };

  field_node* sink = find(sink_id);
  if (!sink) throw contract_error("sink " + std::to_string(sink_id) + " has no position");
  sink->state = node_state::sink;

  std::set<sensor_id> active(active_ids.begin(), active_ids.end());
  active.erase(sink_id);
  for (auto id : active) {
    field_node* n = find(id);
    if (!n) throw contract_error("active node " + std::to_string(id) + " has no position");
    n->state = node_state::active;
  }
  plan.active_ids.assign(active.begin(), active.end());

  // Relay candidates in ascending id order.
  std::vector<const field_node*> relays;
  for (const auto& n : plan.nodes)
    if (n.state != node_state::sleep) relays.push_back(&n);

  auto dist = [](const field_node& a, const field_node& b) { return std::hypot(a.x - b.x, a.y - b.y); };

  std::set<sensor_id> long_hops;
  for (auto id : plan.active_ids) {
    std::vector<sensor_id> path{id};
    const field_node* current = find(id);
    while (current->mote_id != sink_id) {
      const double here = dist(*current, *sink);
      const field_node* next = nullptr;
      double next_remaining = here;
      for (const auto* cand : relays) {
        if (cand == current || dist(*current, *cand) > radio_range) continue;
        const double remaining = dist(*cand, *sink);
        if (remaining < next_remaining) {
          next = cand;
          next_remaining = remaining;
        }
      }
      if (!next) {
        long_hops.insert(current->mote_id);
        next = sink;
      }
      path.push_back(next->mote_id);
      current = next;
    }
    plan.paths.emplace(id, std::move(path));
  }
  plan.long_hops.assign(long_hops.begin(), long_hops.end());
  return plan;
}

std::vector<std::string> check_plan(const routing_plan& plan) {
  std::vector<std::string> problems;
  std::size_t sinks = 0;
  for (const auto& n : plan.nodes)
    if (n.state == node_state::sink) ++sinks;
  if (sinks != 1) problems.push_back("expected exactly one sink, found " + std::to_string(sinks));

  for (auto id : plan.active_ids)
    if (!plan.paths.count(id)) problems.push_back("active node " + std::to_string(id) + " has no path");

  for (const auto& [origin, path] : plan.paths) {
    const std::string tag = "path of " + std::to_string(origin) + ": ";
    if (path.empty() || path.front() != origin) problems.push_back(tag + "does not start at its node");
    if (path.empty() || path.back() != plan.sink_id) problems.push_back(tag + "does not end at the sink");
    std::set<sensor_id> seen;
    for (auto hop : path) {
      if (!seen.insert(hop).second) problems.push_back(tag + "revisits " + std::to_string(hop));
      try {
        if (plan.state_of(hop) == node_state::sleep)
          problems.push_back(tag + "traverses sleeping node " + std::to_string(hop));
      } catch (const contract_error&) {
        problems.push_back(tag + "unknown node " + std::to_string(hop));
      }
    }
    try {
      if (plan.state_of(origin) != node_state::active)
        problems.push_back(tag + "origin is not active");
    } catch (const contract_error&) {
      problems.push_back(tag + "unknown origin");
    }
  }
  return problems;
}

double energy_ledger::total() const {
  double sum = 0.0;
  for (const auto& n : nodes) sum += n.energy;
  return sum;
}

energy_ledger simulate_epochs(const routing_plan& plan, std::size_t n_epochs, const energy_cost& cost) {
  if (n_epochs < 1) throw contract_error("simulate_epochs needs at least one epoch");
  energy_ledger ledger;
  ledger.cost = cost;
  std::map<sensor_id, std::size_t> index;
  for (const auto& n : plan.nodes) {
    index[n.mote_id] = ledger.nodes.size();
    ledger.nodes.push_back({n.mote_id, n.state, 0, 0, 0.0});
  }

  for (std::size_t epoch = 0; epoch < n_epochs; ++epoch) {
    double epoch_energy = 0.0;
    for (const auto& [origin, path] : plan.paths) {
      for (std::size_t h = 0; h + 1 < path.size(); ++h) {
        auto& sender = ledger.nodes[index.at(path[h])];
        auto& receiver = ledger.nodes[index.at(path[h + 1])];
        ++sender.transmissions;
        ++receiver.receptions;
        sender.energy += cost.tx;
        receiver.energy += cost.rx;
        epoch_energy += cost.tx + cost.rx;
      }
    }
    ledger.epoch_totals.push_back(epoch_energy);
  }
  return ledger;
}

std::vector<adaptive_stage> adaptive_loop(const data_matrix& full, const std::vector<sensor_position>& positions,
                                          const std::vector<epoch_window>& schedule, const adaptive_options& options) {
  if (schedule.empty()) throw contract_error("adaptive_loop needs at least one window");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i].length <= schedule[i - 1].length)
      throw contract_error("window lengths must be strictly increasing");

  std::vector<adaptive_stage> stages;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    adaptive_stage stage;
    stage.window = schedule[i];
    const auto window = take_window(full, schedule[i].start, schedule[i].length);

    auto scenario = options.scenario;
    scenario.with_selection = true;
    if (scenario.name.empty()) scenario.name = "window_" + std::to_string(schedule[i].length);
    stage.report = run_scenario(window, scenario);

    const auto& sel = *stage.report.selected;
    std::optional<double> pct;
    if (sel.arm.cv) pct = sel.arm.cv->pooled.percent;

    if (i == 0) {
      stage.adopted = true;
      stage.reason = "initial window";
    } else if (!sel.arm.cv) {
      stage.reason = "selection arm infeasible";
    } else if (!pct) {
      stage.reason = "RMSE percent undefined (target mean is zero)";
    } else if (*pct <= options.rmse_threshold) {
      stage.adopted = true;
      stage.reason = "RMSE " + format_fixed(*pct, 4) + "% <= threshold " + format_double(options.rmse_threshold) + "%";
    } else {
      stage.reason = "RMSE " + format_fixed(*pct, 4) + "% > threshold " + format_double(options.rmse_threshold) + "%";
    }

    if (stage.adopted) {
      stage.plan = build_routing(positions, sel.selection.selected, full.target_id(), options.radio_range);
      stage.plan.window = schedule[i];
    } else {
      stage.plan = stages.back().plan;
    }
    stages.push_back(std::move(stage));
  }
  return stages;
}

void write_plan(std::ostream& out, const routing_plan& plan) {
  out << "# sink_id=" << plan.sink_id << " window_start=" << plan.window.start
      << " window_length=" << plan.window.length << " radio_range=" << format_double(plan.radio_range) << '\n';
  out << "mote_id,state,next_hop,hops,long_hop\n";
  for (const auto& n : plan.nodes) {
    out << n.mote_id << ',' << to_string(n.state) << ',';
    auto it = plan.paths.find(n.mote_id);
    if (it != plan.paths.end()) {
      const bool long_hop = std::binary_search(plan.long_hops.begin(), plan.long_hops.end(), n.mote_id);
      out << it->second[1] << ',' << it->second.size() - 1 << ',' << (long_hop ? 1 : 0);
    } else {
      out << ",0,0";
    }
    out << '\n';
  }
}

void write_ledger_nodes(std::ostream& out, const energy_ledger& ledger) {
  out << "mote_id,state,transmissions,receptions,energy\n";
  for (const auto& n : ledger.nodes)
    out << n.mote_id << ',' << to_string(n.state) << ',' << n.transmissions << ',' << n.receptions << ','
        << format_double(n.energy) << '\n';
}

void write_ledger_epochs(std::ostream& out, const energy_ledger& ledger) {
  out << "epoch,energy\n";
  for (std::size_t e = 0; e < ledger.epoch_totals.size(); ++e)
    out << e << ',' << format_double(ledger.epoch_totals[e]) << '\n';
}

}  // namespace wsnsel
