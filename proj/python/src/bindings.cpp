#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wsnsel/dataset.hpp"
#include "wsnsel/errors.hpp"
#include "wsnsel/evaluation.hpp"
#include "wsnsel/ltef.hpp"
#include "wsnsel/regression.hpp"
#include "wsnsel/selection.hpp"
#include "wsnsel/stats.hpp"
#include "wsnsel/synth.hpp"
#include "wsnsel/wsn_sim.hpp"

namespace py = pybind11;
using namespace wsnsel;

namespace {

std::vector<sensor_position> to_positions(const std::vector<std::tuple<sensor_id, double, double>>& raw) {
  std::vector<sensor_position> out;
  out.reserve(raw.size());
  for (const auto& [id, x, y] : raw) out.push_back({id, x, y});
  return out;
}

py::object optional_float(const std::optional<double>& v) { return v ? py::object(py::float_(*v)) : py::object(py::none()); }

py::dict arm_dict(const arm_result& arm) {
  py::dict d;
  d["features"] = arm.features;
  d["note"] = arm.note;
  d["build_time"] = arm.build_time;
  if (arm.cv) {
    d["rmse"] = arm.cv->pooled.absolute;
    d["rmse_pct"] = optional_float(arm.cv->pooled.percent);
    d["fold_rmse"] = arm.cv->fold_rmse;
  } else {
    d["rmse"] = py::none();
    d["rmse_pct"] = py::none();
    d["fold_rmse"] = py::none();
  }
  d["retained"] = arm.model ? py::cast(arm.model->attribute_ids) : py::object(py::none());
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the wsnsel package";

  auto base = py::register_exception<error>(m, "WsnselError", PyExc_RuntimeError);
  py::register_exception<contract_error>(m, "ContractError", base.ptr());
  py::register_exception<empty_dataset_error>(m, "EmptyDatasetError", base.ptr());
  py::register_exception<fold_too_small_error>(m, "FoldTooSmallError", base.ptr());
  py::register_exception<underdetermined_error>(m, "UnderdeterminedError", base.ptr());
  py::register_exception<dimension_error>(m, "DimensionError", base.ptr());

  py::class_<data_matrix>(m, "DataMatrix")
      .def(py::init<std::vector<std::int64_t>, std::vector<sensor_id>, Eigen::MatrixXd, sensor_id>(),
           py::arg("epochs"), py::arg("sensor_ids"), py::arg("values"), py::arg("target_id"))
      .def_property_readonly("epochs", &data_matrix::epochs)
      .def_property_readonly("sensor_ids", &data_matrix::sensor_ids)
      .def_property_readonly("values", &data_matrix::values)
      .def_property_readonly("target_id", &data_matrix::target_id)
      .def_property_readonly("shape", [](const data_matrix& d) { return py::make_tuple(d.rows(), d.cols()); })
      .def("column", &data_matrix::column)
      .def("feature_ids", &data_matrix::feature_ids)
      .def("take_window", [](const data_matrix& d, std::size_t start, std::size_t n) { return take_window(d, start, n); });

  m.def(
      "parse_sensor_log",
      [](const std::string& text) {
        std::istringstream in(text);
        auto parsed = parse_sensor_log(in);
        return py::make_tuple(parsed.readings.size(), parsed.skipped_line_numbers);
      },
      py::arg("text"), "Returns (well-formed reading count, skipped line numbers).");

  m.def(
      "align_epochs",
      [](const std::string& text, const std::string& field, const std::string& gap, sensor_id target,
         std::size_t min_samples) {
        std::istringstream in(text);
        auto parsed = parse_sensor_log(in);
        auto aligned = align_epochs(parsed.readings, parse_field(field), parse_gap_policy(gap), target,
                                    min_samples);
        py::dict report;
        report["readings"] = aligned.report.readings;
        report["duplicates"] = aligned.report.duplicates;
        std::vector<sensor_id> dropped;
        for (const auto& d : aligned.report.dropped) dropped.push_back(d.id);
        report["dropped"] = dropped;
        report["rows_dropped"] = aligned.report.rows_dropped;
        report["cells_filled"] = aligned.report.cells_filled;
        report["mean_fallback_cells"] = aligned.report.mean_fallback_cells;
        return py::make_tuple(aligned.matrix, report);
      },
      py::arg("text"), py::arg("field") = "temperature", py::arg("gap") = "forward_fill", py::arg("target") = 50,
      py::arg("min_samples") = kDefaultMinSamples);

  m.def(
      "make_mini_dataset",
      [](std::uint64_t seed) {
        auto d = make_mini_dataset(seed);
        return py::make_tuple(d.log, d.positions);
      },
      py::arg("seed") = kMiniSeed);

  m.def(
      "pearson",
      [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return pearson(x, y); }, py::arg("x"), py::arg("y"));

  py::class_<correlation_matrix>(m, "CorrelationMatrix")
      .def(py::init<std::vector<sensor_id>, Eigen::MatrixXd>(), py::arg("ids"), py::arg("r"))
      .def_property_readonly("ids", &correlation_matrix::ids)
      .def_property_readonly("r", &correlation_matrix::r)
      .def("at", &correlation_matrix::at);
  m.def("compute_correlations", &compute_correlations, py::arg("matrix"));

  py::class_<selection_result>(m, "SelectionResult")
      .def(py::init<>())
      .def_readwrite("selected", &selection_result::selected)
      .def_readwrite("merit", &selection_result::merit)
      .def_readonly("evaluations", &selection_result::evaluations)
      .def_readonly("degenerate", &selection_result::degenerate)
      .def_property_readonly("trace", [](const selection_result& r) {
        py::list out;
        for (const auto& t : r.trace) out.append(py::make_tuple(t.subset, t.merit));
        return out;
      });

  m.def(
      "merit_of",
      [](const std::vector<sensor_id>& subset, const correlation_matrix& corr, sensor_id target) {
        return merit_of(subset, corr, target);
      },
      py::arg("subset"), py::arg("corr"), py::arg("target"));
  m.def("best_first_select", &best_first_select, py::arg("corr"), py::arg("target"),
        py::arg("stall_limit") = kDefaultStallLimit);
  m.def("locally_predictive_pass", &locally_predictive_pass, py::arg("result"), py::arg("corr"), py::arg("target"));

  py::class_<linear_model>(m, "LinearModel")
      .def_readonly("target_id", &linear_model::target_id)
      .def_readonly("attribute_ids", &linear_model::attribute_ids)
      .def_readonly("coefficients", &linear_model::coefficients)
      .def_readonly("intercept", &linear_model::intercept)
      .def_readonly("rss", &linear_model::rss)
      .def_readonly("aic", &linear_model::aic)
      .def_readonly("n_train", &linear_model::n_train)
      .def_readonly("build_time", &linear_model::build_time);
  m.def("fit_ols", &fit_ols, py::arg("matrix"), py::arg("features"));
  m.def("stepwise_eliminate", &stepwise_eliminate, py::arg("matrix"), py::arg("features"));
  m.def(
      "predict", [](const linear_model& model, const std::map<sensor_id, double>& row) { return predict(model, row); },
      py::arg("model"), py::arg("row"));

  py::class_<fold_plan>(m, "FoldPlan")
      .def_readonly("k", &fold_plan::k)
      .def_readonly("assignments", &fold_plan::assignments)
      .def_readonly("seed", &fold_plan::seed)
      .def_property_readonly("scheme", [](const fold_plan& p) { return std::string(to_string(p.scheme)); })
      .def("folds", &fold_plan::folds);
  m.def(
      "make_folds",
      [](std::size_t n, std::size_t k, const std::string& scheme, std::uint64_t seed, const Eigen::VectorXd& targets) {
        return make_folds(n, k, parse_fold_scheme(scheme), seed, targets);
      },
      py::arg("n_rows"), py::arg("k"), py::arg("scheme") = "target_stratified", py::arg("seed") = 1,
      py::arg("targets") = Eigen::VectorXd());
  m.def(
      "rmse",
      [](const Eigen::VectorXd& p, const Eigen::VectorXd& a) {
        auto r = rmse(p, a);
        return py::make_tuple(r.absolute, optional_float(r.percent));
      },
      py::arg("predictions"), py::arg("actuals"));
  m.def(
      "cross_validate",
      [](const data_matrix& matrix, const std::vector<sensor_id>& features, const fold_plan& plan) {
        auto r = cross_validate(matrix, features, plan);
        py::dict d;
        d["rmse"] = r.pooled.absolute;
        d["rmse_pct"] = optional_float(r.pooled.percent);
        d["fold_rmse"] = r.fold_rmse;
        d["predictions"] = r.predictions;
        return d;
      },
      py::arg("matrix"), py::arg("features"), py::arg("plan"));
  m.def(
      "run_scenario",
      [](const data_matrix& matrix, std::optional<std::size_t> k, const std::string& scheme, std::uint64_t seed,
         bool with_selection) {
        scenario_options opt;
        opt.k = k;
        opt.scheme = parse_fold_scheme(scheme);
        opt.seed = seed;
        opt.with_selection = with_selection;
        auto rep = run_scenario(matrix, opt);
        py::dict d;
        d["n_sensors"] = rep.n_sensors;
        d["n_train"] = rep.n_train;
        d["k"] = rep.k;
        d["all"] = arm_dict(rep.all);
        if (rep.selected) {
          auto sel = arm_dict(rep.selected->arm);
          sel["ltef"] = rep.selected->ltef;
          sel["merit"] = rep.selected->selection.merit;
          d["selected"] = sel;
        } else {
          d["selected"] = py::none();
        }
        return d;
      },
      py::arg("matrix"), py::arg("k") = py::none(), py::arg("scheme") = "target_stratified", py::arg("seed") = 1,
      py::arg("with_selection") = true);

  m.def("ltef", &ltef, py::arg("total_sensors"), py::arg("participating"));

  py::class_<routing_plan>(m, "RoutingPlan")
      .def_readonly("sink_id", &routing_plan::sink_id)
      .def_readonly("active_ids", &routing_plan::active_ids)
      .def_readonly("paths", &routing_plan::paths)
      .def_readonly("long_hops", &routing_plan::long_hops)
      .def_readonly("radio_range", &routing_plan::radio_range)
      .def("state_of", [](const routing_plan& p, sensor_id id) { return std::string(to_string(p.state_of(id))); });
  m.def(
      "build_routing",
      [](const std::vector<std::tuple<sensor_id, double, double>>& positions, const std::vector<sensor_id>& active,
         sensor_id sink, double range) { return build_routing(to_positions(positions), active, sink, range); },
      py::arg("positions"), py::arg("active_ids"), py::arg("sink_id"), py::arg("radio_range") = kDefaultRadioRange);
  m.def("check_plan", &check_plan, py::arg("plan"));

  py::class_<energy_ledger>(m, "EnergyLedger")
      .def_readonly("epoch_totals", &energy_ledger::epoch_totals)
      .def("total", &energy_ledger::total)
      .def_property_readonly("nodes", [](const energy_ledger& l) {
        py::dict out;
        for (const auto& n : l.nodes) out[py::int_(n.mote_id)] = n.energy;
        return out;
      });
  m.def(
      "simulate_epochs",
      [](const routing_plan& plan, std::size_t n, double tx, double rx) { return simulate_epochs(plan, n, {tx, rx}); },
      py::arg("plan"), py::arg("n_epochs"), py::arg("tx") = 1.0, py::arg("rx") = 0.5);
}
