#include "wsnsel/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "wsnsel/errors.hpp"
#include "wsnsel/ltef.hpp"
#include "wsnsel/stats.hpp"

namespace wsnsel {

fold_scheme parse_fold_scheme(std::string_view name) {
  if (name == "contiguous") return fold_scheme::contiguous;
  if (name == "shuffled") return fold_scheme::shuffled;
  if (name == "target_stratified" || name == "stratified") return fold_scheme::target_stratified;
  throw contract_error("unknown fold scheme '" + std::string(name) + "'");
}

std::string_view to_string(fold_scheme scheme) {
  switch (scheme) {
    case fold_scheme::contiguous: return "contiguous";
    case fold_scheme::shuffled: return "shuffled";
    case fold_scheme::target_stratified: return "target_stratified";
  }
  return "?";
}

std::vector<std::vector<std::size_t>> fold_plan::folds() const {
  std::vector<std::vector<std::size_t>> out(k);
  for (std::size_t row = 0; row < assignments.size(); ++row) out[assignments[row]].push_back(row);
  return out;
}

fold_plan make_folds(std::size_t n_rows, std::size_t k, fold_scheme scheme, std::uint64_t seed,
                     const Eigen::Ref<const Eigen::VectorXd>& targets) {
  if (k < 2 || k > n_rows)
    throw contract_error("fold count k=" + std::to_string(k) + " must lie in [2, " + std::to_string(n_rows) + "]");

  fold_plan plan;
  plan.k = k;
  plan.seed = seed;
  plan.scheme = scheme;
  plan.assignments.assign(n_rows, 0);

  std::vector<std::size_t> order(n_rows);
  std::iota(order.begin(), order.end(), std::size_t{0});

  if (scheme == fold_scheme::target_stratified) {
    if (static_cast<std::size_t>(targets.size()) != n_rows)
      throw contract_error("target_stratified folds need one target value per row");
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return targets[static_cast<Eigen::Index>(a)] < targets[static_cast<Eigen::Index>(b)];
    });
    for (std::size_t i = 0; i < n_rows; ++i) plan.assignments[order[i]] = i % k;
    return plan;
  }

  if (scheme == fold_scheme::shuffled) {
    // mt19937_64 output is fixed by the standard; the distributions are not.
    std::mt19937_64 rng(seed);
    for (std::size_t i = n_rows; i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng() % i);
      std::swap(order[i - 1], order[j]);
    }
  }

  const std::size_t base = n_rows / k;
  const std::size_t extra = n_rows % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) plan.assignments[order[pos++]] = f;
  }
  return plan;
}

std::size_t auto_k(std::size_t n_rows) {
  if (n_rows < 100) return 2;
  if (n_rows < 3000) return 5;
  return 10;
}

rmse_value rmse(const Eigen::Ref<const Eigen::VectorXd>& predictions, const Eigen::Ref<const Eigen::VectorXd>& actuals) {
  if (predictions.size() != actuals.size() || actuals.size() == 0)
    throw contract_error("rmse needs equal non-zero lengths, got " + std::to_string(predictions.size()) + " and " +
                         std::to_string(actuals.size()));
  double ss = 0.0;
  for (Eigen::Index i = 0; i < actuals.size(); ++i) {
    const double e = predictions[i] - actuals[i];
    ss += e * e;
  }
  rmse_value out;
  out.absolute = std::sqrt(ss / static_cast<double>(actuals.size()));
  const double m = mean(actuals);
  if (m != 0.0) out.percent = 100.0 * out.absolute / std::abs(m);
  return out;
}

cv_result cross_validate(const data_matrix& matrix, const std::vector<sensor_id>& features, const fold_plan& plan) {
  if (plan.assignments.size() != matrix.rows())
    throw contract_error("fold plan covers " + std::to_string(plan.assignments.size()) + " rows, matrix has " +
                         std::to_string(matrix.rows()));
  const auto folds = plan.folds();
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const std::size_t train = matrix.rows() - folds[f].size();
    if (train < features.size() + 2)
      throw fold_too_small_error("fold " + std::to_string(f) + " leaves " + std::to_string(train) +
                                 " training rows for " + std::to_string(features.size()) +
                                 " features; use a smaller k or a longer window");
  }

  const Eigen::VectorXd actual = matrix.target();
  cv_result result;
  result.predictions = Eigen::VectorXd::Zero(actual.size());
  double total_time = 0.0;

  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> train_rows;
    train_rows.reserve(matrix.rows() - folds[f].size());
    for (std::size_t row = 0; row < matrix.rows(); ++row)
      if (plan.assignments[row] != f) train_rows.push_back(row);

    const auto model = stepwise_eliminate(matrix.select_rows(train_rows), features);
    total_time += model.build_time;

    Eigen::VectorXd held_pred(static_cast<Eigen::Index>(folds[f].size()));
    Eigen::VectorXd held_actual(held_pred.size());
    for (std::size_t i = 0; i < folds[f].size(); ++i) {
      const auto row = static_cast<Eigen::Index>(folds[f][i]);
      double y = model.intercept;
      for (std::size_t a = 0; a < model.attribute_ids.size(); ++a)
        y += model.coefficients[static_cast<Eigen::Index>(a)] *
             matrix.values()(row, static_cast<Eigen::Index>(matrix.column_index(model.attribute_ids[a])));
      result.predictions[row] = y;
      held_pred[static_cast<Eigen::Index>(i)] = y;
      held_actual[static_cast<Eigen::Index>(i)] = actual[row];
    }
    result.fold_rmse.push_back(rmse(held_pred, held_actual).absolute);
  }

  result.pooled = rmse(result.predictions, actual);
  result.mean_build_time = total_time / static_cast<double>(folds.size());
  return result;
}

namespace {

arm_result evaluate_arm(const data_matrix& matrix, std::vector<sensor_id> features, const fold_plan& plan) {
  arm_result arm;
  arm.features = std::move(features);
  try {
    arm.cv = cross_validate(matrix, arm.features, plan);
    arm.model = stepwise_eliminate(matrix, arm.features);
    arm.build_time = arm.model->build_time;
  } catch (const fold_too_small_error& e) {
    arm.cv.reset();
    arm.model.reset();
    arm.note = std::string("infeasible: ") + e.what();
  } catch (const underdetermined_error& e) {
    arm.cv.reset();
    arm.model.reset();
    arm.note = std::string("infeasible: ") + e.what();
  }
  return arm;
}

}  // namespace

experiment_report run_scenario(const data_matrix& matrix, const scenario_options& options) {
  experiment_report report;
  report.name = options.name;
  report.n_sensors = matrix.cols();
  report.n_train = matrix.rows();
  report.k = options.k.value_or(auto_k(matrix.rows()));
  report.plan = make_folds(matrix.rows(), report.k, options.scheme, options.seed, matrix.target());

  report.all = evaluate_arm(matrix, matrix.feature_ids(), report.plan);

  if (options.with_selection) {
    selection_arm sel;
    const auto start = std::chrono::steady_clock::now();
    const auto corr = compute_correlations(matrix);
    sel.selection = locally_predictive_pass(best_first_select(corr, matrix.target_id(), options.stall_limit), corr,
                                            matrix.target_id());
    sel.selection_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    sel.ltef = ltef(report.n_sensors, sel.selection.selected.size());
    sel.arm = evaluate_arm(matrix, sel.selection.selected, report.plan);
    report.selected = std::move(sel);
  }
  return report;
}

}  // namespace wsnsel
