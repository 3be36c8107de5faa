// Command-line entry point: ingest, experiment, simulate, report, synth.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wsnsel/app.hpp"
#include "wsnsel/errors.hpp"
#include "wsnsel/synth.hpp"

namespace {

struct overrides {
  std::optional<std::string> config, data, positions, field, windows, k, gap, out, scheme;
  std::optional<int> sink;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold, radio_range, tx_cost, rx_cost;
  std::optional<std::size_t> min_samples, stall_limit, epochs;
  bool no_selection = false;
};

void add_common(CLI::App& cmd, overrides& o) {
  cmd.add_option("--config", o.config, "INI config file");
  cmd.add_option("--data", o.data, "raw sensor log");
  cmd.add_option("--positions", o.positions, "sensor positions file");
  cmd.add_option("--field", o.field, "temperature|humidity|light|voltage");
  cmd.add_option("--sink", o.sink, "sink sensor id");
  cmd.add_option("--windows", o.windows, "window lengths, e.g. 35,2700,5400 or start:length");
  cmd.add_option("--k", o.k, "fold count or 'auto'");
  cmd.add_option("--seed", o.seed, "fold seed");
  cmd.add_option("--gap", o.gap, "drop_row|forward_fill|column_mean");
  cmd.add_option("--threshold", o.threshold, "adaptive RMSE threshold, percent");
  cmd.add_option("--out", o.out, "output directory");
  cmd.add_flag("--no-selection,--no_selection", o.no_selection, "all-sensors arm only");
  cmd.add_option("--scheme", o.scheme, "contiguous|shuffled|target_stratified");
  cmd.add_option("--min-samples,--min_samples", o.min_samples, "minimum samples per sensor");
  cmd.add_option("--stall-limit,--stall_limit", o.stall_limit, "best-first stall limit");
  cmd.add_option("--radio-range,--radio_range", o.radio_range, "radio range in meters");
  cmd.add_option("--tx-cost,--tx_cost", o.tx_cost, "energy per transmitted hop");
  cmd.add_option("--rx-cost,--rx_cost", o.rx_cost, "energy per received hop");
  cmd.add_option("--epochs", o.epochs, "simulated epochs per plan");
}

wsnsel::run_config make_config(const overrides& o) {
  wsnsel::run_config c;
  if (o.config) wsnsel::load_config(*o.config, c);
  if (o.data) c.data_path = *o.data;
  if (o.positions) c.positions_path = *o.positions;
  if (o.field) c.field = wsnsel::parse_field(*o.field);
  if (o.sink) c.sink = *o.sink;
  if (o.windows) c.windows = wsnsel::parse_windows(*o.windows);
  if (o.k) c.k = *o.k == "auto" ? std::nullopt : std::optional<std::size_t>(std::stoul(*o.k));
  if (o.seed) c.seed = *o.seed;
  if (o.gap) c.gap = wsnsel::parse_gap_policy(*o.gap);
  if (o.threshold) c.threshold = *o.threshold;
  if (o.out) c.out_dir = *o.out;
  if (o.no_selection) c.no_selection = true;
  if (o.scheme) c.scheme = wsnsel::parse_fold_scheme(*o.scheme);
  if (o.min_samples) c.min_samples = *o.min_samples;
  if (o.stall_limit) c.stall_limit = *o.stall_limit;
  if (o.radio_range) c.radio_range = *o.radio_range;
  if (o.tx_cost) c.cost.tx = *o.tx_cost;
  if (o.rx_cost) c.cost.rx = *o.rx_cost;
  if (o.epochs) c.sim_epochs = *o.epochs;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensor selection, sink prediction and adaptive routing for sensor-network logs"};
  app.require_subcommand(1);

  overrides o;
  auto* ingest = app.add_subcommand("ingest", "align a raw log into an epoch x sensor matrix");
  auto* experiment = app.add_subcommand("experiment", "cross-validated RMSE with and without sensor selection");
  auto* simulate = app.add_subcommand("simulate", "adaptive active/sleep routing and energy ledgers");
  auto* report = app.add_subcommand("report", "print existing outputs");
  for (auto* cmd : {ingest, experiment, simulate, report}) add_common(*cmd, o);

  std::string synth_dir = "data/mini";
  std::uint64_t synth_seed = wsnsel::kMiniSeed;
  auto* synth = app.add_subcommand("synth", "write the synthetic mini dataset");
  synth->add_option("--out", synth_dir, "output directory");
  synth->add_option("--seed", synth_seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return wsnsel::cmd_synth(synth_dir, synth_seed, std::cerr);
    const auto config = make_config(o);
    if (*ingest) return wsnsel::cmd_ingest(config, std::cerr);
    if (*experiment) return wsnsel::cmd_experiment(config, std::cerr);
    if (*simulate) return wsnsel::cmd_simulate(config, std::cerr);
    if (*report) return wsnsel::cmd_report(config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "wsnsel: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
