#include "wsnsel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wsnsel/errors.hpp"

namespace wsnsel {

namespace {

void require_length(Eigen::Index n) {
  if (n < 2) throw dimension_error("need at least 2 samples, got " + std::to_string(n));
}

// Centered sum of squares, two-pass.
double centered_ss(const Eigen::Ref<const Eigen::VectorXd>& x, double m) {
  double ss = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double d = x[i] - m;
    ss += d * d;
  }
  return ss;
}

}  // namespace

double mean(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() == 0) throw dimension_error("mean of empty vector");
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += x[i];
  return s / static_cast<double>(x.size());
}

double sample_stddev(const Eigen::Ref<const Eigen::VectorXd>& x) {
  require_length(x.size());
  return std::sqrt(centered_ss(x, mean(x)) / static_cast<double>(x.size() - 1));
}

double pearson(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != y.size())
    throw dimension_error("pearson: length mismatch " + std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()));
  require_length(x.size());
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Eigen::VectorXd standardize(const Eigen::Ref<const Eigen::VectorXd>& x) {
  require_length(x.size());
  const double m = mean(x);
  const double sd = sample_stddev(x);
  if (sd == 0.0) return Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = (x[i] - m) / sd;
  return out;
}

correlation_matrix::correlation_matrix(std::vector<sensor_id> ids, Eigen::MatrixXd r)
    : ids_(std::move(ids)), r_(std::move(r)) {
  if (static_cast<std::size_t>(r_.rows()) != ids_.size() || r_.rows() != r_.cols())
    throw dimension_error("correlation grid does not match its ids");
  if (!std::is_sorted(ids_.begin(), ids_.end()) ||
      std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end())
    throw contract_error("correlation ids must be strictly ascending");
}

bool correlation_matrix::contains(sensor_id id) const noexcept {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

std::size_t correlation_matrix::index_of(sensor_id id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id)
    throw contract_error("sensor " + std::to_string(id) + " not in correlation matrix");
  return static_cast<std::size_t>(it - ids_.begin());
}

correlation_matrix compute_correlations(const data_matrix& matrix) {
  const auto& v = matrix.values();
  const Eigen::Index n = v.cols();
  Eigen::MatrixXd r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r(i, i) = pearson(v.col(i), v.col(i)) == 0.0 ? 0.0 : 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double c = pearson(v.col(i), v.col(j));
      r(i, j) = c;
      r(j, i) = c;
    }
  }
  return correlation_matrix(matrix.sensor_ids(), std::move(r));
}

}  // namespace wsnsel
