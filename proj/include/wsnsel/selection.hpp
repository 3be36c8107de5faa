#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wsnsel/stats.hpp"

namespace wsnsel {

inline constexpr std::size_t kDefaultStallLimit = 5;

struct trace_entry {
  std::vector<sensor_id> subset;
  double merit = 0.0;
};

struct selection_result {
  std::vector<sensor_id> selected;  // ascending, never contains the target
  double merit = 0.0;
  std::vector<trace_entry> trace;   // accepted subsets in acceptance order
  std::size_t evaluations = 0;
  // No feature correlates with the target; the single best feature was returned.
  bool degenerate = false;
};

/// Correlation-based subset merit
///
///   merit = k * mean|r_cf| / sqrt(k + k (k - 1) * mean|r_ff|)
///
/// with k the subset size, r_cf feature-target and r_ff feature-feature
/// correlations. Reduces to |r_cf| for k = 1. Order of `subset` is irrelevant.
double merit_of(std::span<const sensor_id> subset, const correlation_matrix& corr, sensor_id target);

/// Best-first forward search over feature subsets, starting from the empty
/// set. The open list is ordered by merit (descending), then by the ascending
/// id sequence. Stops once `stall_limit` consecutive expansions fail to
/// improve the best merit, or the open list runs dry.
selection_result best_first_select(const correlation_matrix& corr, sensor_id target,
                                   std::size_t stall_limit = kDefaultStallLimit);

/// Adds excluded features, highest |r_cf| first, when no selected feature
/// correlates with them more strongly than they correlate with the target.
/// Sweeps until nothing is added. Features with zero target correlation are
/// never added.
selection_result locally_predictive_pass(const selection_result& result, const correlation_matrix& corr,
                                         sensor_id target);

}  // namespace wsnsel
