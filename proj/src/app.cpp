#include "wsnsel/app.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "wsnsel/errors.hpp"
#include "wsnsel/format.hpp"
#include "wsnsel/synth.hpp"

namespace wsnsel {

namespace fs = std::filesystem;

namespace {

// Re-raises the in-flight error with a prefix, keeping its category.
[[noreturn]] void rethrow_prefixed(const std::string& prefix) {
  try {
    throw;
  } catch (const empty_dataset_error& e) {
    throw empty_dataset_error(prefix + e.what());
  } catch (const bounds_error& e) {
    throw bounds_error(prefix + e.what());
  } catch (const contract_error& e) {
    throw contract_error(prefix + e.what());
  } catch (const fold_too_small_error& e) {
    throw fold_too_small_error(prefix + e.what());
  } catch (const io_error& e) {
    throw io_error(prefix + e.what());
  } catch (const error& e) {
    throw error(prefix + e.what());
  }
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  std::istringstream in(std::string(trim(text)));
  T value{};
  if (!(in >> value) || !(in >> std::ws).eof()) throw contract_error("bad value for '" + key + "': '" + text + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw contract_error("bad boolean for '" + key + "': '" + text + "'");
}

std::optional<std::size_t> parse_k(const std::string& text) {
  if (trim(text) == "auto") return std::nullopt;
  return parse_value<std::size_t>("k", text);
}

std::string ids_text(const std::vector<sensor_id>& ids) { return join_ids(ids, " "); }

std::string optional_pct(const std::optional<double>& pct) { return pct ? format_double(*pct) : ""; }

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path.string());
  return in;
}

std::vector<sensor_position> read_positions_file(const fs::path& path) {
  auto in = open_input(path);
  try {
    return load_positions(in);
  } catch (const parse_error& e) {
    throw parse_error(path.string() + ": " + e.what(), e.line());
  }
}

data_matrix read_matrix_file(const run_config& config) {
  const auto path = config.matrix_path();
  if (!fs::exists(path)) throw io_error(path.string() + " not found; run 'ingest' first");
  auto in = open_input(path);
  return read_matrix(in, config.sink);
}

std::string scenario_name(std::size_t index) { return "exp" + std::to_string(index + 1); }

scenario_options scenario_for(const run_config& config, std::size_t index) {
  scenario_options opt;
  opt.name = scenario_name(index);
  opt.k = config.k;
  opt.scheme = config.scheme;
  opt.seed = config.seed;
  opt.stall_limit = config.stall_limit;
  opt.with_selection = !config.no_selection;
  return opt;
}

std::string model_text(const linear_model& model) {
  std::ostringstream out;
  write_model(out, model);
  return out.str();
}

std::string arm_row(const experiment_report& r, std::string_view arm_name, const arm_result& arm, bool ltef_column,
                    const std::optional<double>& ltef_value) {
  std::string row = fmt::format("{},{},{},{},{},{},{},", r.name, arm_name, r.n_sensors, r.n_train, r.k,
                                arm.features.size(), ids_text(arm.features));
  if (arm.model && arm.cv) {
    row += fmt::format("{},{},{}", ids_text(arm.model->attribute_ids), format_double(arm.cv->pooled.absolute),
                       optional_pct(arm.cv->pooled.percent));
  } else {
    row += ",,";
  }
  if (ltef_column) row += "," + (ltef_value ? format_double(*ltef_value) : std::string());
  row += "," + arm.note + "\n";
  return row;
}

std::string experiment_table(const std::vector<experiment_report>& reports, bool with_selection) {
  std::string out = "scenario,arm,n_sensors,n_train,k,n_features,features,retained,rmse,rmse_pct";
  if (with_selection) out += ",ltef";
  out += ",note\n";
  for (const auto& r : reports) {
    out += arm_row(r, "all", r.all, with_selection, std::nullopt);
    if (r.selected) out += arm_row(r, "selected", r.selected->arm, true, r.selected->ltef);
  }
  return out;
}

std::string build_time_table(const std::vector<experiment_report>& reports) {
  std::string out = "scenario,arm,build_time_s,cv_mean_build_time_s,selection_time_s\n";
  auto row = [&](const experiment_report& r, std::string_view arm_name, const arm_result& arm, double sel_time) {
    out += fmt::format("{},{},{},{},{}\n", r.name, arm_name, arm.model ? format_double(arm.build_time) : "",
                       arm.cv ? format_double(arm.cv->mean_build_time) : "", format_double(sel_time));
  };
  for (const auto& r : reports) {
    row(r, "all", r.all, 0.0);
    if (r.selected) row(r, "selected", r.selected->arm, r.selected->selection_time);
  }
  return out;
}

std::string selection_map(const std::vector<experiment_report>& reports, const std::vector<sensor_position>& positions,
                          sensor_id sink) {
  std::string out = "scenario,mote_id,x,y,role\n";
  for (const auto& r : reports) {
    if (!r.selected) continue;
    const auto& sel = r.selected->selection.selected;
    for (const auto& p : positions) {
      std::string_view role = "sleep";
      if (p.mote_id == sink)
        role = "sink";
      else if (std::binary_search(sel.begin(), sel.end(), p.mote_id))
        role = "active";
      out += fmt::format("{},{},{},{},{}\n", r.name, p.mote_id, format_double(p.x), format_double(p.y), role);
    }
  }
  return out;
}

std::string fmt_rmse(const arm_result& arm) {
  if (!arm.cv) return "n/a";
  const auto& p = arm.cv->pooled;
  return format_fixed(p.absolute, 4) + (p.percent ? " (" + format_fixed(*p.percent, 2) + "%)" : "");
}

std::string summary_text(const std::vector<experiment_report>& reports, const run_config& config) {
  std::string out;
  out += fmt::format("Sink sensor {} | field {} | folds {} | seed {}\n\n", config.sink, to_string(config.field),
                     to_string(config.scheme), config.seed);
  out += fmt::format("{:<6} {:>7} {:>7} {:>3}  {:<28} {:>11} {:>11} {:>18} {:>18} {:>7}\n", "exp", "sensors", "train",
                     "k", "selected", "time_all_s", "time_sel_s", "rmse_all", "rmse_sel", "ltef");
  for (const auto& r : reports) {
    const bool sel = r.selected.has_value();
    out += fmt::format("{:<6} {:>7} {:>7} {:>3}  {:<28} {:>11} {:>11} {:>18} {:>18} {:>7}\n", r.name, r.n_sensors,
                       r.n_train, r.k, sel ? join_ids(r.selected->selection.selected, ",") : "-",
                       r.all.model ? format_fixed(r.all.build_time, 5) : "n/a",
                       sel && r.selected->arm.model ? format_fixed(r.selected->arm.build_time, 5) : "-", fmt_rmse(r.all),
                       sel ? fmt_rmse(r.selected->arm) : "-", sel ? format_fixed(r.selected->ltef, 3) : "-");
  }
  for (const auto& r : reports) {
    if (!r.all.note.empty()) out += fmt::format("\n{} all: {}", r.name, r.all.note);
    if (r.selected && !r.selected->arm.note.empty()) out += fmt::format("\n{} selected: {}", r.name, r.selected->arm.note);
  }
  out += "\n\nRMSE is pooled over held-out folds; percent is relative to the mean sink reading.\n";
  if (!config.no_selection)
    out += "Sensor selection runs once per window on all of its rows, so the selection arm's CV error is optimistic.\n";
  return out;
}

}  // namespace

std::vector<epoch_window> parse_windows(const std::string& text) {
  std::vector<epoch_window> windows;
  for (const auto& item : split(trim(text), ',')) {
    const auto t = std::string(trim(item));
    if (t.empty()) throw contract_error("empty entry in window list '" + text + "'");
    epoch_window w;
    if (auto colon = t.find(':'); colon != std::string::npos) {
      w.start = parse_value<std::size_t>("windows", t.substr(0, colon));
      w.length = parse_value<std::size_t>("windows", t.substr(colon + 1));
    } else {
      w.length = parse_value<std::size_t>("windows", t);
    }
    windows.push_back(w);
  }
  return windows;
}

void load_config(const fs::path& path, run_config& config) {
  if (!fs::exists(path)) throw io_error("config file " + path.string() + " not found");
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw parse_error(path.string() + ": " + e.message(), e.line());
  }
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  using setter = void (*)(run_config&, const std::string&, const std::string&);
  static const std::map<std::string, std::map<std::string, setter>> keys = {
      {"data",
       {{"path", nullptr},
        {"positions", nullptr},
        {"field", [](run_config& c, const std::string&, const std::string& v) { c.field = parse_field(trim(v)); }},
        {"sink", [](run_config& c, const std::string& k, const std::string& v) { c.sink = parse_value<int>(k, v); }},
        {"gap", [](run_config& c, const std::string&, const std::string& v) { c.gap = parse_gap_policy(trim(v)); }},
        {"min_samples", [](run_config& c, const std::string& k, const std::string& v) {
           c.min_samples = parse_value<std::size_t>(k, v);
         }}}},
      {"experiment",
       {{"windows", [](run_config& c, const std::string&, const std::string& v) { c.windows = parse_windows(v); }},
        {"k", [](run_config& c, const std::string&, const std::string& v) { c.k = parse_k(v); }},
        {"scheme", [](run_config& c, const std::string&, const std::string& v) { c.scheme = parse_fold_scheme(trim(v)); }},
        {"seed", [](run_config& c, const std::string& k, const std::string& v) { c.seed = parse_value<std::uint64_t>(k, v); }},
        {"stall_limit", [](run_config& c, const std::string& k, const std::string& v) {
           c.stall_limit = parse_value<std::size_t>(k, v);
         }},
        {"no_selection", [](run_config& c, const std::string& k, const std::string& v) {
           c.no_selection = parse_bool(k, v);
         }}}},
      {"simulate",
       {{"threshold", [](run_config& c, const std::string& k, const std::string& v) { c.threshold = parse_value<double>(k, v); }},
        {"tx_cost", [](run_config& c, const std::string& k, const std::string& v) { c.cost.tx = parse_value<double>(k, v); }},
        {"rx_cost", [](run_config& c, const std::string& k, const std::string& v) { c.cost.rx = parse_value<double>(k, v); }},
        {"radio_range", [](run_config& c, const std::string& k, const std::string& v) {
           c.radio_range = parse_value<double>(k, v);
         }},
        {"epochs", [](run_config& c, const std::string& k, const std::string& v) {
           c.sim_epochs = parse_value<std::size_t>(k, v);
         }}}},
      {"output", {{"out", nullptr}}},
  };

  for (const auto& [section, entries] : tree) {
    auto sec = keys.find(section);
    if (sec == keys.end()) throw contract_error(path.string() + ": unknown section [" + section + "]");
    for (const auto& [key, node] : entries) {
      auto it = sec->second.find(key);
      if (it == sec->second.end())
        throw contract_error(path.string() + ": unknown key '" + key + "' in [" + section + "]");
      const auto value = node.get_value<std::string>();
      if (section == "data" && key == "path")
        config.data_path = resolve(value);
      else if (section == "data" && key == "positions")
        config.positions_path = resolve(value);
      else if (section == "output" && key == "out")
        config.out_dir = resolve(value);
      else
        it->second(config, key, value);
    }
  }
}

void validate_config(const run_config& config, bool need_data, bool need_positions) {
  if (config.windows.empty()) throw contract_error("no windows configured");
  for (std::size_t i = 1; i < config.windows.size(); ++i)
    if (config.windows[i].length <= config.windows[i - 1].length)
      throw contract_error("windows must be strictly increasing in length");
  for (const auto& w : config.windows)
    if (w.length < 2) throw contract_error("window length must be at least 2");
  if (need_data && (config.data_path.empty() || !fs::exists(config.data_path)))
    throw io_error("data file '" + config.data_path.string() + "' not found");
  if (need_positions && (config.positions_path.empty() || !fs::exists(config.positions_path)))
    throw io_error("positions file '" + config.positions_path.string() + "' not found");
  if (!config.positions_path.empty() && !fs::exists(config.positions_path))
    throw io_error("positions file '" + config.positions_path.string() + "' not found");
  if (!(config.threshold >= 0.0)) throw contract_error("threshold must be >= 0");
  if (config.stall_limit < 1) throw contract_error("stall_limit must be >= 1");
}

int cmd_ingest(const run_config& config, std::ostream& log) {
  validate_config(config, true, false);
  auto in = open_input(config.data_path);
  parsed_log parsed;
  try {
    parsed = parse_sensor_log(in);
  } catch (const error&) {
    rethrow_prefixed(config.data_path.string() + ": ");
  }
  auto aligned = align_epochs(parsed.readings, config.field, config.gap, config.sink, config.min_samples);

  std::ostringstream matrix_text;
  write_matrix(matrix_text, aligned.matrix);
  write_file_atomic(config.matrix_path(), matrix_text.str());

  const auto& r = aligned.report;
  std::string report;
  report += fmt::format("source: {}\n", config.data_path.filename().string());
  report += fmt::format("field: {}\ngap_policy: {}\nmin_samples: {}\n", to_string(config.field), to_string(config.gap),
                        config.min_samples);
  report += fmt::format("well_formed_lines: {}\nskipped_lines: {}\n", parsed.readings.size(), parsed.skipped_lines);
  if (!parsed.skipped_line_numbers.empty()) {
    std::vector<int> first;
    for (std::size_t i = 0; i < parsed.skipped_line_numbers.size() && i < 20; ++i)
      first.push_back(static_cast<int>(parsed.skipped_line_numbers[i]));
    report += fmt::format("skipped_line_numbers: {}{}\n", join_ids(first, " "),
                          parsed.skipped_line_numbers.size() > 20 ? " ..." : "");
  }
  report += fmt::format("duplicates: {}\n", r.duplicates);
  report += "dropped_sensors:";
  for (const auto& d : r.dropped) report += fmt::format(" {}({} samples)", d.id, d.samples);
  report += "\n";
  report += fmt::format("rows: {}\ncolumns: {}\nrows_dropped: {}\ncells_filled: {}\nmean_fallback_cells: {}\n",
                        aligned.matrix.rows(), aligned.matrix.cols(), r.rows_dropped, r.cells_filled,
                        r.mean_fallback_cells);
  report += fmt::format("sink: {}\n", config.sink);
  write_file_atomic(config.out_dir / "ingest_report.txt", report);

  log << fmt::format("ingest: {} rows x {} sensors -> {}\n", aligned.matrix.rows(), aligned.matrix.cols(),
                     config.matrix_path().string());
  return 0;
}

int cmd_experiment(const run_config& config, std::ostream& log) {
  validate_config(config, false, false);
  const auto matrix = read_matrix_file(config);

  std::vector<experiment_report> reports;
  for (std::size_t i = 0; i < config.windows.size(); ++i) {
    const auto name = scenario_name(i);
    try {
      const auto window = take_window(matrix, config.windows[i].start, config.windows[i].length);
      reports.push_back(run_scenario(window, scenario_for(config, i)));
    } catch (const error&) {
      rethrow_prefixed(name + ": ");
    }
    log << fmt::format("experiment {}: {} rows done\n", name, config.windows[i].length);
  }

  const bool with_selection = !config.no_selection;
  write_file_atomic(config.out_dir / "experiment.csv", experiment_table(reports, with_selection));
  write_file_atomic(config.out_dir / "build_times.csv", build_time_table(reports));
  write_file_atomic(config.out_dir / "summary.txt", summary_text(reports, config));
  if (with_selection && !config.positions_path.empty())
    write_file_atomic(config.out_dir / "selection_map.csv",
                      selection_map(reports, read_positions_file(config.positions_path), config.sink));
  for (const auto& r : reports) {
    if (r.all.model) write_file_atomic(config.out_dir / "models" / (r.name + "_all.model"), model_text(*r.all.model));
    if (r.selected && r.selected->arm.model)
      write_file_atomic(config.out_dir / "models" / (r.name + "_selected.model"), model_text(*r.selected->arm.model));
  }
  return 0;
}

int cmd_simulate(const run_config& config, std::ostream& log) {
  validate_config(config, false, true);
  const auto matrix = read_matrix_file(config);
  const auto positions = read_positions_file(config.positions_path);

  adaptive_options options;
  options.scenario = scenario_for(config, 0);
  options.scenario.name.clear();
  options.rmse_threshold = config.threshold;
  options.radio_range = config.radio_range;
  const auto stages = adaptive_loop(matrix, positions, config.windows, options);

  // Baseline: every positioned sensor of the matrix awake.
  std::vector<sensor_id> everyone;
  for (auto id : matrix.feature_ids())
    for (const auto& p : positions)
      if (p.mote_id == id) everyone.push_back(id);
  const auto baseline = build_routing(positions, everyone, config.sink, config.radio_range);
  const double baseline_energy = simulate_epochs(baseline, config.sim_epochs, config.cost).total();

  const auto dir = config.out_dir / "simulate";
  std::string adoption = "stage,window_start,window_length,selected,rmse_pct,adopted,active_after,reason\n";
  std::string comparison = "stage,active,baseline_active,plan_energy,baseline_energy,energy_ratio,ltef\n";
  bool valid = true;

  auto check = [&](const routing_plan& plan, const std::string& what) {
    for (const auto& problem : check_plan(plan)) {
      log << what << ": " << problem << '\n';
      valid = false;
    }
  };
  check(baseline, "baseline plan");

  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    const auto tag = std::to_string(i + 1);
    check(s.plan, "stage " + tag + " plan");

    const auto ledger = simulate_epochs(s.plan, config.sim_epochs, config.cost);
    for (const auto& n : ledger.nodes)
      if (n.state == node_state::sleep && n.energy != 0.0) {
        log << "stage " << tag << ": sleeping node " << n.mote_id << " consumed energy\n";
        valid = false;
      }

    std::ostringstream plan_text, nodes_text, epochs_text;
    write_plan(plan_text, s.plan);
    write_ledger_nodes(nodes_text, ledger);
    write_ledger_epochs(epochs_text, ledger);
    write_file_atomic(dir / ("plan_stage" + tag + ".csv"), plan_text.str());
    write_file_atomic(dir / ("ledger_stage" + tag + "_nodes.csv"), nodes_text.str());
    write_file_atomic(dir / ("ledger_stage" + tag + "_epochs.csv"), epochs_text.str());

    const auto& sel = *s.report.selected;
    std::optional<double> pct;
    if (sel.arm.cv) pct = sel.arm.cv->pooled.percent;
    adoption += fmt::format("{},{},{},{},{},{},{},{}\n", tag, s.window.start, s.window.length,
                            ids_text(sel.selection.selected), optional_pct(pct), s.adopted ? "adopt" : "reject",
                            ids_text(s.plan.active_ids), s.reason);

    const double plan_energy = ledger.total();
    comparison += fmt::format("{},{},{},{},{},{},{}\n", tag, s.plan.active_ids.size(), baseline.active_ids.size(),
                              format_double(plan_energy), format_double(baseline_energy),
                              plan_energy > 0.0 ? format_double(baseline_energy / plan_energy) : "",
                              format_double(ltef(matrix.cols(), std::max<std::size_t>(s.plan.active_ids.size(), 1))));
    log << fmt::format("simulate stage {}: {} ({} active)\n", tag, s.adopted ? "adopted" : "rejected",
                       s.plan.active_ids.size());
  }
  write_file_atomic(dir / "adoption_log.csv", adoption);
  write_file_atomic(dir / "energy_comparison.csv", comparison);
  return valid ? 0 : 1;
}

int cmd_report(const run_config& config, std::ostream& out) {
  const std::pair<fs::path, std::string_view> files[] = {
      {config.out_dir / "ingest_report.txt", "Ingest"},
      {config.out_dir / "summary.txt", "Experiment summary"},
      {config.out_dir / "experiment.csv", "Experiment table"},
      {config.out_dir / "simulate" / "adoption_log.csv", "Adaptive routing"},
      {config.out_dir / "simulate" / "energy_comparison.csv", "Energy"},
  };
  bool any = false;
  for (const auto& [path, title] : files) {
    if (!fs::exists(path)) continue;
    any = true;
    out << "== " << title << " (" << path.string() << ")\n" << read_file(path) << '\n';
  }
  if (!any) throw io_error("no outputs found under " + config.out_dir.string());
  return 0;
}

int cmd_synth(const fs::path& dir, std::uint64_t seed, std::ostream& log) {
  const auto data = make_mini_dataset(seed);
  write_file_atomic(dir / "mini_log.txt", data.log);
  write_file_atomic(dir / "mini_positions.txt", data.positions);
  log << "synth: wrote " << (dir / "mini_log.txt").string() << " and " << (dir / "mini_positions.txt").string() << '\n';
  return 0;
}

}  // namespace wsnsel
