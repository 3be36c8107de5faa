#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "wsnsel/dataset.hpp"
#include "wsnsel/regression.hpp"
#include "wsnsel/selection.hpp"

namespace wsnsel {

enum class fold_scheme { contiguous, shuffled, target_stratified };

fold_scheme parse_fold_scheme(std::string_view name);
std::string_view to_string(fold_scheme scheme);

struct fold_plan {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;  // fold index per row
  std::uint64_t seed = 0;
  fold_scheme scheme = fold_scheme::target_stratified;

  // Row indices of each fold, ascending.
  std::vector<std::vector<std::size_t>> folds() const;
};

/// Balanced k-fold assignment; fold sizes differ by at most one and the
/// first n % k folds take the extra row.
///   contiguous         consecutive blocks of rows
///   shuffled           blocks over a seeded permutation of the rows
///   target_stratified  rows sorted by target, dealt round-robin
/// `targets` is only read by target_stratified and must have n_rows entries.
fold_plan make_folds(std::size_t n_rows, std::size_t k, fold_scheme scheme, std::uint64_t seed,
                     const Eigen::Ref<const Eigen::VectorXd>& targets = Eigen::VectorXd());

// Fold count by window size: n < 100 -> 2, n < 3000 -> 5, otherwise 10.
std::size_t auto_k(std::size_t n_rows);

struct rmse_value {
  double absolute = 0.0;
  std::optional<double> percent;  // absent when the actuals average to zero
};

rmse_value rmse(const Eigen::Ref<const Eigen::VectorXd>& predictions,
                const Eigen::Ref<const Eigen::VectorXd>& actuals);

struct cv_result {
  rmse_value pooled;
  std::vector<double> fold_rmse;
  double mean_build_time = 0.0;
  Eigen::VectorXd predictions;  // held-out prediction per row
};

// Stepwise model trained on k-1 folds, evaluated on the held-out fold; the
// pooled RMSE is over all held-out predictions in row order.
cv_result cross_validate(const data_matrix& matrix, const std::vector<sensor_id>& features, const fold_plan& plan);

struct scenario_options {
  std::string name;
  std::optional<std::size_t> k;  // auto_k when unset
  fold_scheme scheme = fold_scheme::target_stratified;
  std::uint64_t seed = 1;
  std::size_t stall_limit = kDefaultStallLimit;
  bool with_selection = true;
};

struct arm_result {
  std::vector<sensor_id> features;
  // Unset when the window has too few rows to fit this many features.
  std::optional<cv_result> cv;
  std::optional<linear_model> model;  // stepwise fit on the whole window
  std::string note;
  double build_time = 0.0;
};

struct selection_arm {
  selection_result selection;
  double selection_time = 0.0;
  double ltef = 0.0;
  arm_result arm;
};

struct experiment_report {
  std::string name;
  std::size_t n_sensors = 0;  // every column, sink included
  std::size_t n_train = 0;
  std::size_t k = 0;
  fold_plan plan;
  arm_result all;
  std::optional<selection_arm> selected;
};

/// One experiment scenario. The all-sensors arm uses every non-target
/// column; the selection arm runs best-first search and the locally
/// predictive pass once on the whole window, then both arms are
/// cross-validated with the same fold plan.
experiment_report run_scenario(const data_matrix& matrix, const scenario_options& options);

}  // namespace wsnsel
