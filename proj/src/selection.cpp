#include "wsnsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "wsnsel/errors.hpp"

namespace wsnsel {

namespace {

using subset_t = std::vector<sensor_id>;

// Merit on column indices (already validated, sorted ascending).
double merit_indices(const std::vector<Eigen::Index>& idx, const Eigen::MatrixXd& r, Eigen::Index target) {
  const auto k = static_cast<double>(idx.size());
  double sum_cf = 0.0;
  for (auto i : idx) sum_cf += std::abs(r(i, target));
  double sum_ff = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b) sum_ff += std::abs(r(idx[a], idx[b]));
  const double mean_cf = sum_cf / k;
  const double mean_ff = idx.size() > 1 ? sum_ff / (k * (k - 1.0) / 2.0) : 0.0;
  return k * mean_cf / std::sqrt(k + k * (k - 1.0) * mean_ff);
}

struct node {
  double merit;
  subset_t subset;
};

struct node_order {
  bool operator()(const node& a, const node& b) const {
    if (a.merit != b.merit) return a.merit > b.merit;
    return a.subset < b.subset;
  }
};

class merit_evaluator {
public:
  merit_evaluator(const correlation_matrix& corr, sensor_id target)
      : corr_(corr), target_(static_cast<Eigen::Index>(corr.index_of(target))) {}

  double operator()(const subset_t& subset) {
    ++count;
    idx_.clear();
    for (auto id : subset) idx_.push_back(static_cast<Eigen::Index>(corr_.index_of(id)));
    std::sort(idx_.begin(), idx_.end());
    return merit_indices(idx_, corr_.r(), target_);
  }

  std::size_t count = 0;

private:
  const correlation_matrix& corr_;
  Eigen::Index target_;
  std::vector<Eigen::Index> idx_;
};

}  // namespace

double merit_of(std::span<const sensor_id> subset, const correlation_matrix& corr, sensor_id target) {
  if (subset.empty()) throw contract_error("merit_of: empty subset");
  const auto target_idx = static_cast<Eigen::Index>(corr.index_of(target));
  std::vector<Eigen::Index> idx;
  idx.reserve(subset.size());
  for (auto id : subset) {
    if (id == target) throw contract_error("merit_of: subset contains the target " + std::to_string(id));
    idx.push_back(static_cast<Eigen::Index>(corr.index_of(id)));
  }
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
    throw contract_error("merit_of: subset contains duplicate ids");
  return merit_indices(idx, corr.r(), target_idx);
}

selection_result best_first_select(const correlation_matrix& corr, sensor_id target, std::size_t stall_limit) {
  if (stall_limit < 1) throw contract_error("best_first_select: stall_limit must be >= 1");
  if (!corr.contains(target)) throw contract_error("best_first_select: target not in correlation matrix");
  std::vector<sensor_id> candidates;
  for (auto id : corr.ids())
    if (id != target) candidates.push_back(id);
  if (candidates.size() < 2)
    throw contract_error("best_first_select: need at least 2 candidate features besides the target");

  selection_result result;

  // Degenerate: nothing correlates with the target.
  sensor_id strongest = candidates.front();
  double strongest_r = -1.0;
  for (auto id : candidates) {
    const double r = std::abs(corr.at(id, target));
    if (r > strongest_r) {
      strongest_r = r;
      strongest = id;
    }
  }
  if (strongest_r == 0.0) {
    result.selected = {strongest};
    result.merit = 0.0;
    result.trace.push_back({result.selected, 0.0});
    result.evaluations = 0;
    result.degenerate = true;
    return result;
  }

  merit_evaluator evaluate(corr, target);
  std::set<node, node_order> open;
  std::set<subset_t> visited;
  open.insert({0.0, {}});
  visited.insert({});

  subset_t best;
  double best_merit = 0.0;
  std::size_t stall = 0;

  while (!open.empty() && stall < stall_limit) {
    node current = *open.begin();
    open.erase(open.begin());

    bool improved = false;
    for (auto f : candidates) {
      if (std::binary_search(current.subset.begin(), current.subset.end(), f)) continue;
      subset_t child = current.subset;
      child.insert(std::upper_bound(child.begin(), child.end(), f), f);
      if (!visited.insert(child).second) continue;
      const double m = evaluate(child);
      if (m > best_merit) {
        best_merit = m;
        best = child;
        improved = true;
        result.trace.push_back({child, m});
      }
      open.insert({m, std::move(child)});
    }
    stall = improved ? 0 : stall + 1;
  }

  result.selected = std::move(best);
  result.merit = best_merit;
  result.evaluations = evaluate.count;
  return result;
}

selection_result locally_predictive_pass(const selection_result& result, const correlation_matrix& corr,
                                         sensor_id target) {
  if (result.selected.empty()) throw contract_error("locally_predictive_pass: empty selection");
  selection_result out = result;

  std::vector<sensor_id> excluded;
  for (auto id : corr.ids())
    if (id != target && !std::binary_search(out.selected.begin(), out.selected.end(), id))
      excluded.push_back(id);
  std::stable_sort(excluded.begin(), excluded.end(), [&](sensor_id a, sensor_id b) {
    return std::abs(corr.at(a, target)) > std::abs(corr.at(b, target));
  });

  bool added = true;
  bool changed = false;
  while (added) {
    added = false;
    for (auto it = excluded.begin(); it != excluded.end();) {
      const double r_cf = std::abs(corr.at(*it, target));
      bool blocked = r_cf == 0.0;
      for (auto s : out.selected) {
        if (blocked) break;
        blocked = std::abs(corr.at(s, *it)) > r_cf;
      }
      if (blocked) {
        ++it;
        continue;
      }
      out.selected.insert(std::upper_bound(out.selected.begin(), out.selected.end(), *it), *it);
      it = excluded.erase(it);
      added = true;
      changed = true;
    }
  }

  if (changed) {
    out.merit = merit_of(out.selected, corr, target);
    ++out.evaluations;
    out.trace.push_back({out.selected, out.merit});
  }
  return out;
}

}  // namespace wsnsel
