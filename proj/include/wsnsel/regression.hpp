#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <vector>

#include <Eigen/Core>

#include "wsnsel/dataset.hpp"

namespace wsnsel {

// Pivots below this fraction of the largest pivot are treated as zero.
inline constexpr double kRankTolerance = 1e-10;

struct linear_model {
  sensor_id target_id = 0;
  std::vector<sensor_id> attribute_ids;
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  double rss = 0.0;
  double aic = 0.0;
  std::size_t n_train = 0;
  double build_time = 0.0;  // seconds, wall clock
};

// n * ln(rss / n) + 2p, p counting the intercept. -infinity when rss == 0.
double aic_of(double rss, std::size_t n, std::size_t p);

// Least squares with intercept. Collinear or constant columns get the
// minimum-norm solution. Requires rows >= features + 2.
linear_model fit_ols(const data_matrix& matrix, const std::vector<sensor_id>& features);

/// Backward elimination under the Akaike criterion. Each step drops the
/// attribute with the smallest |coefficient * sd(feature)| (lower id on ties)
/// and keeps the reduced model only if its AIC is strictly lower. Stops at
/// the first rejected removal or at a single attribute.
linear_model stepwise_eliminate(const data_matrix& matrix, const std::vector<sensor_id>& features);

// Throws contract_error naming the first attribute missing from `row`.
double predict(const linear_model& model, const std::map<sensor_id, double>& row);

// Predictions for every row of `matrix`, which must contain all attributes.
Eigen::VectorXd predict(const linear_model& model, const data_matrix& matrix);

void write_model(std::ostream& out, const linear_model& model);
linear_model read_model(std::istream& in);

}  // namespace wsnsel
