#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wsnsel/dataset.hpp"
#include "wsnsel/evaluation.hpp"
#include "wsnsel/wsn_sim.hpp"

namespace wsnsel {

inline constexpr sensor_id kDefaultSink = 50;

struct run_config {
  std::filesystem::path data_path;
  std::filesystem::path positions_path;
  measurement_field field = measurement_field::temperature;
  sensor_id sink = kDefaultSink;
  gap_policy gap = gap_policy::forward_fill;
  std::size_t min_samples = kDefaultMinSamples;

  std::vector<epoch_window> windows{{0, 35}, {0, 2700}, {0, 5400}};
  std::optional<std::size_t> k;  // auto when unset
  fold_scheme scheme = fold_scheme::target_stratified;
  std::uint64_t seed = 1;
  std::size_t stall_limit = kDefaultStallLimit;
  bool no_selection = false;

  double threshold = 5.0;  // percent
  energy_cost cost;
  double radio_range = kDefaultRadioRange;
  std::size_t sim_epochs = 100;

  std::filesystem::path out_dir = "out";

  std::filesystem::path matrix_path() const { return out_dir / "matrix.csv"; }
};

/// Reads an INI file with [data], [experiment], [simulate] and [output]
/// sections into `config`. Relative paths resolve against the file's
/// directory. Unknown keys are rejected.
void load_config(const std::filesystem::path& path, run_config& config);

// "35,2700" (start 0) or "100:35,0:2700" (start:length)
std::vector<epoch_window> parse_windows(const std::string& text);

// Checks window ordering and that `data_path` / `positions_path` exist when required.
void validate_config(const run_config& config, bool need_data, bool need_positions);

// Each command writes its outputs under config.out_dir and returns the process exit status.
int cmd_ingest(const run_config& config, std::ostream& log);
int cmd_experiment(const run_config& config, std::ostream& log);
int cmd_simulate(const run_config& config, std::ostream& log);
int cmd_report(const run_config& config, std::ostream& out);
int cmd_synth(const std::filesystem::path& dir, std::uint64_t seed, std::ostream& log);

}  // namespace wsnsel
