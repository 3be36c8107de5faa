#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "wsnsel/dataset.hpp"

namespace wsnsel {

// Sample (n-1) convention throughout.
double mean(const Eigen::Ref<const Eigen::VectorXd>& x);
double sample_stddev(const Eigen::Ref<const Eigen::VectorXd>& x);

// Product-moment correlation. Exactly 0 when either input is constant.
// Throws dimension_error on length mismatch or length < 2.
double pearson(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);

// Mean 0, sample sd 1; constant input maps to zeros.
Eigen::VectorXd standardize(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Pairwise Pearson coefficients over every column of a data matrix, the
/// target included. Symmetric by construction; the diagonal is 1 for
/// non-constant columns and 0 for constant ones.
class correlation_matrix {
public:
  correlation_matrix(std::vector<sensor_id> ids, Eigen::MatrixXd r);

  const std::vector<sensor_id>& ids() const noexcept { return ids_; }
  const Eigen::MatrixXd& r() const noexcept { return r_; }

  bool contains(sensor_id id) const noexcept;
  std::size_t index_of(sensor_id id) const;
  double at(sensor_id a, sensor_id b) const { return r_(static_cast<Eigen::Index>(index_of(a)), static_cast<Eigen::Index>(index_of(b))); }

private:
  std::vector<sensor_id> ids_;
  Eigen::MatrixXd r_;
};

correlation_matrix compute_correlations(const data_matrix& matrix);

}  // namespace wsnsel
