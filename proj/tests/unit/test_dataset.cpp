#include <doctest.h>

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <random>
#include <sstream>
#include <tuple>

#include "wsnsel/dataset.hpp"
#include "wsnsel/errors.hpp"

using namespace wsnsel;

namespace {

sensor_reading reading(std::int64_t epoch, sensor_id mote, double temp) {
  sensor_reading r;
  r.epoch = epoch;
  r.mote_id = mote;
  r.temperature = temp;
  return r;
}

}  // namespace

TEST_CASE("parse_sensor_log reads the deployment log layout") {
  std::istringstream in("2004-02-28 00:59:16.02785 3 1 19.9884 37.0933 45.08 2.69964\n");
  auto log = parse_sensor_log(in);
  REQUIRE(log.readings.size() == 1);
  const auto& r = log.readings[0];
  CHECK(r.epoch == 3);
  CHECK(r.mote_id == 1);
  CHECK(*r.temperature == 19.9884);
  CHECK(*r.humidity == 37.0933);
  CHECK(*r.light == 45.08);
  CHECK(*r.voltage == 2.69964);
  CHECK(r.date == std::chrono::year_month_day{std::chrono::year{2004}, std::chrono::month{2}, std::chrono::day{28}});
  CHECK(r.time_of_day.count() == ((59 * 60) + 16) * 1'000'000LL + 27850);
  CHECK(log.skipped_lines == 0);
}

TEST_CASE("parse_sensor_log keeps lines with missing trailing measurements") {
  std::istringstream in("2004-02-28 01:00:00.5 7 2 20.5\n2004-02-28 01:00:00.5 8 2\n");
  auto log = parse_sensor_log(in);
  REQUIRE(log.readings.size() == 2);
  CHECK(*log.readings[0].temperature == 20.5);
  CHECK_FALSE(log.readings[0].humidity.has_value());
  CHECK_FALSE(log.readings[1].temperature.has_value());
  CHECK(log.readings[1].value(measurement_field::voltage) == std::nullopt);
}

TEST_CASE("parse_sensor_log counts and skips malformed lines") {
  std::ostringstream text;
  for (int i = 0; i < 10; ++i) text << "2004-02-28 00:00:0" << i << ".0 " << i << " 4 20.0 35.0 10.0 2.6\n";
  text << "this is not a reading\n";
  text << "2004-02-28 00:00:01 x 4 20.0\n";
  std::istringstream in(text.str());
  auto log = parse_sensor_log(in);
  CHECK(log.readings.size() == 10);
  CHECK(log.skipped_lines == 2);
  CHECK(log.skipped_line_numbers == std::vector<std::size_t>{11, 12});
}

TEST_CASE("parse_sensor_log rejects bad ids, dates and too many fields") {
  std::istringstream in(
      "2004-02-30 00:00:00 1 1 20\n"     // no such date
      "2004-02-28 00:00:00 1 0 20\n"     // mote 0
      "2004-02-28 00:00:00 -1 1 20\n"    // negative epoch
      "2004-02-28 00:00:00 1 1 1 2 3 4 5\n"
      "2004-02-28 25:00:00 1 1 20\n"
      "2004-02-28 00:00:00 1 1 nan\n"
      "2004-02-28 00:00:00 2 1 20\n");
  auto log = parse_sensor_log(in);
  CHECK(log.readings.size() == 1);
  CHECK(log.skipped_lines == 6);
}

TEST_CASE("parse_sensor_log errors on an empty dataset") {
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_sensor_log(empty), empty_dataset_error);
  std::istringstream junk("junk\nmore junk\n");
  CHECK_THROWS_AS(parse_sensor_log(junk), empty_dataset_error);
}

TEST_CASE("align_epochs is an identity pivot on gap-free data") {
  std::vector<sensor_reading> rs{reading(1, 2, 10.0), reading(1, 1, 1.0), reading(2, 1, 2.0), reading(2, 2, 20.0)};
  auto out = align_epochs(rs, measurement_field::temperature, gap_policy::forward_fill, 1, 1);
  CHECK(out.matrix.epochs() == std::vector<std::int64_t>{1, 2});
  CHECK(out.matrix.sensor_ids() == std::vector<sensor_id>{1, 2});
  CHECK(out.matrix.values()(0, 0) == 1.0);
  CHECK(out.matrix.values()(0, 1) == 10.0);
  CHECK(out.matrix.values()(1, 0) == 2.0);
  CHECK(out.matrix.values()(1, 1) == 20.0);
  CHECK(out.report.cells_filled == 0);
}

TEST_CASE("align_epochs drops sensors below min_samples") {
  std::vector<sensor_reading> rs;
  for (int e = 0; e < 40; ++e)
    for (int s = 1; s <= 54; ++s)
      if (s != 5 || e < 34) rs.push_back(reading(e, s, 20.0 + s + 0.1 * e));
  auto out = align_epochs(rs, measurement_field::temperature, gap_policy::forward_fill, 50);
  CHECK(out.matrix.cols() == 53);
  CHECK_FALSE(out.matrix.has_sensor(5));
  REQUIRE(out.report.dropped.size() == 1);
  CHECK(out.report.dropped[0].id == 5);
  CHECK(out.report.dropped[0].samples == 34);
}

TEST_CASE("gap policies") {
  // sensor 2 misses epoch 2 (interior) and epoch 0 (leading)
  std::vector<sensor_reading> rs{reading(0, 1, 1.0), reading(1, 1, 2.0), reading(2, 1, 3.0), reading(3, 1, 4.0),
                                 reading(1, 2, 10.0), reading(3, 2, 30.0)};

  SUBCASE("forward_fill copies the previous value and falls back to the mean for leading gaps") {
    auto out = align_epochs(rs, measurement_field::temperature, gap_policy::forward_fill, 1, 1);
    const auto& v = out.matrix.values();
    CHECK(v(2, 1) == 10.0);
    CHECK(v(0, 1) == 20.0);
    CHECK(out.report.cells_filled == 2);
    CHECK(out.report.mean_fallback_cells == 1);
  }
  SUBCASE("column_mean") {
    auto out = align_epochs(rs, measurement_field::temperature, gap_policy::column_mean, 1, 1);
    CHECK(out.matrix.values()(0, 1) == 20.0);
    CHECK(out.matrix.values()(2, 1) == 20.0);
    CHECK(out.report.mean_fallback_cells == 0);
  }
  SUBCASE("drop_row") {
    auto out = align_epochs(rs, measurement_field::temperature, gap_policy::drop_row, 1, 1);
    CHECK(out.matrix.epochs() == std::vector<std::int64_t>{1, 3});
    CHECK(out.report.rows_dropped == 2);
  }
}

TEST_CASE("align_epochs keeps the last duplicate and reports the count") {
  std::vector<sensor_reading> rs{reading(0, 1, 1.0), reading(0, 1, 1.5), reading(1, 1, 2.0),
                                 reading(0, 2, 5.0), reading(1, 2, 6.0)};
  auto out = align_epochs(rs, measurement_field::temperature, gap_policy::forward_fill, 1, 1);
  CHECK(out.report.duplicates == 1);
  CHECK(out.matrix.values()(0, 0) == 1.5);
}

TEST_CASE("align_epochs errors") {
  std::vector<sensor_reading> rs{reading(0, 1, 1.0), reading(1, 1, 2.0), reading(0, 2, 3.0), reading(1, 2, 4.0)};
  CHECK_THROWS_AS(align_epochs({}, measurement_field::temperature, gap_policy::forward_fill, 1),
                  empty_dataset_error);
  CHECK_THROWS_AS(align_epochs(rs, measurement_field::temperature, gap_policy::forward_fill, 1, 35),
                  empty_dataset_error);
  // humidity absent everywhere
  CHECK_THROWS_AS(align_epochs(rs, measurement_field::humidity, gap_policy::forward_fill, 1, 1), empty_dataset_error);
  // target not among the sensors
  CHECK_THROWS_AS(align_epochs(rs, measurement_field::temperature, gap_policy::forward_fill, 9, 1),
                  empty_dataset_error);
}

TEST_CASE("property: pivot round-trip and totality of gap policies") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n_sensors = 2 + static_cast<int>(rng() % 6);
    const int n_epochs = 2 + static_cast<int>(rng() % 20);
    std::vector<sensor_reading> rs;
    std::multiset<std::tuple<std::int64_t, sensor_id, double>> original;
    for (int e = 0; e < n_epochs; ++e)
      for (int s = 1; s <= n_sensors; ++s) {
        const double v = static_cast<double>(rng() % 10000) / 100.0;
        rs.push_back(reading(e * 3 + 1, s, v));
        original.insert({e * 3 + 1, s, v});
      }
    std::shuffle(rs.begin(), rs.end(), rng);
    auto out = align_epochs(rs, measurement_field::temperature, gap_policy::drop_row, 1, 1);
    std::multiset<std::tuple<std::int64_t, sensor_id, double>> flat;
    for (std::size_t r = 0; r < out.matrix.rows(); ++r)
      for (std::size_t c = 0; c < out.matrix.cols(); ++c)
        flat.insert({out.matrix.epochs()[r], out.matrix.sensor_ids()[c],
                     out.matrix.values()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))});
    CHECK(flat == original);

    // knock out cells; forward_fill and column_mean must stay total
    std::vector<sensor_reading> gappy;
    for (const auto& r : rs)
      if (rng() % 4 != 0) gappy.push_back(r);
    for (auto policy : {gap_policy::forward_fill, gap_policy::column_mean}) {
      try {
        auto filled = align_epochs(gappy, measurement_field::temperature, policy, 1, 1);
        CHECK(filled.matrix.values().allFinite());
      } catch (const error&) {
        // too few rows/columns left is a legitimate outcome
      }
    }
  }
}

TEST_CASE("take_window") {
  Eigen::MatrixXd v(10, 2);
  for (int r = 0; r < 10; ++r) v.row(r) << r, 10.0 * r;
  std::vector<std::int64_t> epochs(10);
  std::iota(epochs.begin(), epochs.end(), 0);
  data_matrix m(epochs, {1, 2}, v, 2);

  SUBCASE("full length is identity") {
    auto w = take_window(m, 0, 10);
    CHECK(w.values() == m.values());
    CHECK(w.epochs() == m.epochs());
    CHECK(w.target_id() == 2);
  }
  SUBCASE("contiguous slice, bit-identical rows") {
    auto w = take_window(m, 3, 4);
    CHECK(w.rows() == 4);
    for (int r = 0; r < 4; ++r) CHECK((w.values().row(r).array() == m.values().row(r + 3).array()).all());
    CHECK(w.epochs().front() == 3);
  }
  SUBCASE("out of range") {
    CHECK_THROWS_AS(take_window(m, 8, 5), bounds_error);
    CHECK_THROWS_AS(take_window(m, 11, 0), bounds_error);
  }
}

TEST_CASE("take_window of 2700 rows from 5400") {
  Eigen::MatrixXd v = Eigen::MatrixXd::Random(5400, 3);
  std::vector<std::int64_t> epochs(5400);
  std::iota(epochs.begin(), epochs.end(), 0);
  data_matrix m(epochs, {1, 2, 3}, v, 3);
  CHECK(take_window(m, 0, 2700).rows() == 2700);
}

TEST_CASE("load_positions") {
  SUBCASE("single line") {
    std::istringstream in("# comment\n1 21.5 23.0\n");
    auto ps = load_positions(in);
    REQUIRE(ps.size() == 1);
    CHECK(ps[0].mote_id == 1);
    CHECK(ps[0].x == 21.5);
    CHECK(ps[0].y == 23.0);
  }
  SUBCASE("duplicate id names the second line") {
    std::istringstream in("7 1 1\n7 2 2\n");
    try {
      load_positions(in);
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("malformed coordinate") {
    std::istringstream in("1 1 1\n2 abc 3\n");
    CHECK_THROWS_AS(load_positions(in), parse_error);
  }
  SUBCASE("54 sensors") {
    std::ostringstream text;
    for (int i = 1; i <= 54; ++i) text << i << ' ' << i * 0.5 << ' ' << 40 - i * 0.5 << '\n';
    std::istringstream in(text.str());
    CHECK(load_positions(in).size() == 54);
  }
}

TEST_CASE("matrix export/import round-trips exactly") {
  Eigen::MatrixXd v(3, 3);
  v << 0.1, 1.0 / 3.0, -2.5e-7, 19.9884, 1e300, 3.0, -0.0, 42.0, 2.0 / 7.0;
  data_matrix m({5, 6, 9}, {3, 14, 50}, v, 50);
  std::stringstream io;
  write_matrix(io, m);
  auto back = read_matrix(io, 50);
  CHECK(back.epochs() == m.epochs());
  CHECK(back.sensor_ids() == m.sensor_ids());
  CHECK((back.values().array() == m.values().array()).all());
}

TEST_CASE("data_matrix invariants") {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(data_matrix({1, 2}, {1, 2}, v, 3), contract_error);
  CHECK_THROWS_AS(data_matrix({2, 1}, {1, 2}, v, 1), contract_error);
  CHECK_THROWS_AS(data_matrix({1}, {1, 2}, Eigen::MatrixXd::Zero(1, 2), 1), dimension_error);
  v(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(data_matrix({1, 2}, {1, 2}, v, 1), contract_error);
}
