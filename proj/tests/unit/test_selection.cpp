#include <doctest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "wsnsel/errors.hpp"
#include "wsnsel/selection.hpp"

using namespace wsnsel;

namespace {

// Symmetric correlation grid from an upper-triangle list, unit diagonal.
correlation_matrix corr_of(std::vector<sensor_id> ids, std::initializer_list<std::tuple<int, int, double>> entries) {
  const auto n = static_cast<Eigen::Index>(ids.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n);
  for (auto [i, j, v] : entries) {
    r(i, j) = v;
    r(j, i) = v;
  }
  return correlation_matrix(std::move(ids), r);
}

}  // namespace

TEST_CASE("merit_of examples") {
  // ids 1, 2 features; 3 target
  SUBCASE("k = 1 reduces to |r_cf|") {
    auto c = corr_of({1, 2, 3}, {{0, 2, 0.9}, {1, 2, 0.1}, {0, 1, 0.2}});
    const std::vector<sensor_id> s{1};
    CHECK(merit_of(s, c, 3) == 0.9);
    auto neg = corr_of({1, 2, 3}, {{0, 2, -0.9}});
    CHECK(merit_of(s, neg, 3) == 0.9);
  }
  SUBCASE("k = 2, mean r_cf 0.8, r_ff 0.5") {
    auto c = corr_of({1, 2, 3}, {{0, 2, 0.7}, {1, 2, 0.9}, {0, 1, 0.5}});
    const std::vector<sensor_id> s{1, 2};
    // 2 * 0.8 / sqrt(2 + 2 * 0.5)
    CHECK(merit_of(s, c, 3) == doctest::Approx(1.6 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(merit_of(s, c, 3) == doctest::Approx(0.9237604307).epsilon(1e-9));
  }
  SUBCASE("zero target correlation") {
    auto c = corr_of({1, 2, 3}, {{0, 1, 0.6}});
    const std::vector<sensor_id> s{2, 1};
    CHECK(merit_of(s, c, 3) == 0.0);
  }
}

TEST_CASE("merit_of contract errors") {
  auto c = corr_of({1, 2, 3}, {{0, 2, 0.5}});
  CHECK_THROWS_AS(merit_of(std::vector<sensor_id>{}, c, 3), contract_error);
  CHECK_THROWS_AS(merit_of(std::vector<sensor_id>{1, 3}, c, 3), contract_error);
  CHECK_THROWS_AS(merit_of(std::vector<sensor_id>{1, 1}, c, 3), contract_error);
  CHECK_THROWS_AS(merit_of(std::vector<sensor_id>{7}, c, 3), contract_error);
}

TEST_CASE("property: merit is order-invariant and agrees with the pairwise-average oracle") {
  oracle::gaussian g(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto m = oracle::random_factor_matrix(g, 8, 40);
    auto c = compute_correlations(m);
    std::vector<sensor_id> s;
    for (sensor_id id = 1; id <= 8; ++id)
      if (g.bits() % 2) s.push_back(id);
    if (s.empty()) s.push_back(1);
    std::vector<Eigen::Index> idx;
    for (auto id : s) idx.push_back(static_cast<Eigen::Index>(c.index_of(id)));
    const double expected = oracle::merit(idx, c.r(), static_cast<Eigen::Index>(c.index_of(9)));
    CHECK(std::abs(merit_of(s, c, 9) - expected) < 1e-12);
    auto reversed = s;
    std::reverse(reversed.begin(), reversed.end());
    CHECK(merit_of(reversed, c, 9) == merit_of(s, c, 9));
  }
}

TEST_CASE("best_first_select finds the unique best single feature") {
  // A=1 strongly predictive; everything mutually redundant
  auto c = corr_of({1, 2, 3, 4}, {{0, 3, 0.9}, {1, 3, 0.3}, {2, 3, 0.2}, {0, 1, 0.9}, {0, 2, 0.9}, {1, 2, 0.9}});
  auto best = oracle::exhaustive_merit(c, 4);
  REQUIRE(best.ids == std::vector<sensor_id>{1});
  auto result = best_first_select(c, 4);
  CHECK(result.selected == std::vector<sensor_id>{1});
  CHECK(result.merit == doctest::Approx(0.9));
  CHECK_FALSE(result.degenerate);
}

TEST_CASE("best_first_select keeps one copy of a duplicated perfect predictor") {
  Eigen::MatrixXd v(30, 4);
  oracle::gaussian g(1);
  for (Eigen::Index r = 0; r < 30; ++r) {
    const double t = g();
    v(r, 0) = t;
    v(r, 1) = t;
    v(r, 2) = g();
    v(r, 3) = t;
  }
  auto m = oracle::make_matrix(v, {2, 5, 7, 9}, 9);
  auto result = best_first_select(compute_correlations(m), 9);
  CHECK(result.selected == std::vector<sensor_id>{2});
}

TEST_CASE("best_first_select equals the exhaustive optimum on small random instances") {
  oracle::gaussian g(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + g.bits() % 9;
    auto m = oracle::random_factor_matrix(g, n, 30 + static_cast<Eigen::Index>(g.bits() % 70));
    auto c = compute_correlations(m);
    auto result = best_first_select(c, m.target_id());
    auto best = oracle::exhaustive_merit(c, m.target_id());
    CHECK(std::abs(result.merit - best.merit) < 1e-10);
    CHECK(result.merit == merit_of(result.selected, c, m.target_id()));
  }
}

TEST_CASE("best_first_select result invariants and determinism") {
  oracle::gaussian g(8);
  auto m = oracle::random_factor_matrix(g, 20, 80);
  auto c = compute_correlations(m);
  auto a = best_first_select(c, m.target_id());
  auto b = best_first_select(c, m.target_id());
  CHECK(a.selected == b.selected);
  CHECK(a.evaluations == b.evaluations);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].subset == b.trace[i].subset);
    CHECK(a.trace[i].merit == b.trace[i].merit);
  }
  CHECK_FALSE(a.selected.empty());
  CHECK(std::is_sorted(a.selected.begin(), a.selected.end()));
  CHECK(std::find(a.selected.begin(), a.selected.end(), m.target_id()) == a.selected.end());
  // accepted merits strictly increase and end at the result
  for (std::size_t i = 1; i < a.trace.size(); ++i) CHECK(a.trace[i].merit > a.trace[i - 1].merit);
  CHECK(a.trace.back().subset == a.selected);
}

TEST_CASE("best_first_select degenerate and contract cases") {
  auto zero = corr_of({1, 2, 3, 4}, {{0, 1, 0.5}});
  auto d = best_first_select(zero, 4);
  CHECK(d.degenerate);
  CHECK(d.selected == std::vector<sensor_id>{1});

  auto small = corr_of({1, 2}, {{0, 1, 0.5}});
  CHECK_THROWS_AS(best_first_select(small, 2), contract_error);
  CHECK_THROWS_AS(best_first_select(zero, 4, 0), contract_error);
  CHECK_THROWS_AS(best_first_select(zero, 8), contract_error);
}

TEST_CASE("locally_predictive_pass") {
  // selected {1}; 2 strong and weakly tied to 1; 3 weak and redundant with 1; target 4
  auto c = corr_of({1, 2, 3, 4}, {{0, 3, 0.95}, {1, 3, 0.9}, {2, 3, 0.2}, {0, 1, 0.3}, {0, 2, 0.8}, {1, 2, 0.1}});
  selection_result start;
  start.selected = {1};
  start.merit = merit_of(start.selected, c, 4);

  auto out = locally_predictive_pass(start, c, 4);
  CHECK(out.selected == std::vector<sensor_id>{1, 2});
  CHECK(out.merit == merit_of(out.selected, c, 4));

  auto again = locally_predictive_pass(out, c, 4);
  CHECK(again.selected == out.selected);
  CHECK(again.merit == out.merit);
}

TEST_CASE("locally_predictive_pass skips features with no target correlation") {
  auto c = corr_of({1, 2, 3}, {{0, 2, 0.5}});
  selection_result start;
  start.selected = {1};
  CHECK(locally_predictive_pass(start, c, 3).selected == std::vector<sensor_id>{1});
}

TEST_CASE("property: locally_predictive_pass only adds, and is a fixed point") {
  oracle::gaussian g(31);
  for (int trial = 0; trial < 30; ++trial) {
    auto m = oracle::random_factor_matrix(g, 12, 60);
    auto c = compute_correlations(m);
    auto base = best_first_select(c, m.target_id());
    auto out = locally_predictive_pass(base, c, m.target_id());
    CHECK(std::includes(out.selected.begin(), out.selected.end(), base.selected.begin(), base.selected.end()));
    CHECK(locally_predictive_pass(out, c, m.target_id()).selected == out.selected);
    // every added feature passed the rule against the final selection
    for (auto f : out.selected) {
      if (std::binary_search(base.selected.begin(), base.selected.end(), f)) continue;
      CHECK(std::abs(c.at(f, m.target_id())) > 0.0);
    }
  }
}
