#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wsnsel/dataset.hpp"
#include "wsnsel/evaluation.hpp"
#include "wsnsel/ltef.hpp"

namespace wsnsel {

enum class node_state { active, sleep, sink };

std::string_view to_string(node_state state);

// Default radio reach in meters; a node can only hand a message to nodes within it.
inline constexpr double kDefaultRadioRange = 10.0;

struct field_node {
  sensor_id mote_id = 0;
  double x = 0.0;
  double y = 0.0;
  node_state state = node_state::sleep;
};

struct epoch_window {
  std::size_t start = 0;
  std::size_t length = 0;
};

struct routing_plan {
  sensor_id sink_id = 0;
  std::vector<sensor_id> active_ids;  // ascending, sink excluded
  std::vector<field_node> nodes;      // every positioned node, ascending id
  // Per active node: node ids from the node itself to the sink.
  std::map<sensor_id, std::vector<sensor_id>> paths;
  // Nodes that had no closer neighbor in range and hop straight to the sink.
  std::vector<sensor_id> long_hops;
  epoch_window window;
  double radio_range = kDefaultRadioRange;

  node_state state_of(sensor_id id) const;
};

/// Greedy geographic forwarding over the active nodes and the sink. Each hop
/// goes to the in-range node that is strictly closer to the sink and leaves
/// the least remaining distance (lower id on ties). A node with no such
/// neighbor hops directly to the sink and is recorded in `long_hops`.
/// Nodes present in `positions` but not active are asleep. Throws
/// contract_error for ids without a position.
routing_plan build_routing(const std::vector<sensor_position>& positions, const std::vector<sensor_id>& active_ids,
                           sensor_id sink_id, double radio_range = kDefaultRadioRange);

// Empty when the plan satisfies every path invariant; otherwise one message per violation.
std::vector<std::string> check_plan(const routing_plan& plan);

struct energy_cost {
  double tx = 1.0;  // per message-hop, charged to the sender
  double rx = 0.5;  // per message-hop, charged to the receiver
};

struct node_energy {
  sensor_id mote_id = 0;
  node_state state = node_state::sleep;
  std::size_t transmissions = 0;
  std::size_t receptions = 0;
  double energy = 0.0;
};

struct energy_ledger {
  energy_cost cost;
  std::vector<node_energy> nodes;     // ascending id, sleeping nodes included
  std::vector<double> epoch_totals;
  double total() const;
};

// Each epoch every active node originates one message, forwarded along its path.
energy_ledger simulate_epochs(const routing_plan& plan, std::size_t n_epochs, const energy_cost& cost = {});

struct adaptive_options {
  scenario_options scenario;
  double rmse_threshold = 5.0;  // percent
  double radio_range = kDefaultRadioRange;
};

struct adaptive_stage {
  epoch_window window;
  experiment_report report;
  routing_plan plan;  // the plan in force after this stage
  bool adopted = false;
  std::string reason;
};

/// Re-runs selection on each window (strictly increasing lengths). The first
/// stage is always adopted; later stages replace the plan only when the
/// selection arm's CV RMSE percent is at or below the threshold.
std::vector<adaptive_stage> adaptive_loop(const data_matrix& full, const std::vector<sensor_position>& positions,
                                          const std::vector<epoch_window>& schedule, const adaptive_options& options);

void write_plan(std::ostream& out, const routing_plan& plan);
void write_ledger_nodes(std::ostream& out, const energy_ledger& ledger);
void write_ledger_epochs(std::ostream& out, const energy_ledger& ledger);

}  // namespace wsnsel
