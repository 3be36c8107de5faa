#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace wsnsel {

using sensor_id = int;

enum class measurement_field { temperature, humidity, light, voltage };

measurement_field parse_field(std::string_view name);
std::string_view to_string(measurement_field field);

enum class gap_policy { drop_row, forward_fill, column_mean };

gap_policy parse_gap_policy(std::string_view name);
std::string_view to_string(gap_policy policy);

inline constexpr sensor_id kMaxMoteId = 54;
inline constexpr std::size_t kDefaultMinSamples = 35;

// One line of the raw deployment log. Measurements may be absent.
struct sensor_reading {
  std::chrono::year_month_day date;
  std::chrono::microseconds time_of_day{0};
  std::int64_t epoch = 0;
  sensor_id mote_id = 0;
  std::optional<double> temperature;
  std::optional<double> humidity;
  std::optional<double> light;
  std::optional<double> voltage;

  std::optional<double> value(measurement_field field) const;
};

struct sensor_position {
  sensor_id mote_id = 0;
  double x = 0.0;
  double y = 0.0;
};

struct parsed_log {
  std::vector<sensor_reading> readings;
  std::size_t skipped_lines = 0;
  std::vector<std::size_t> skipped_line_numbers;
};

// Epoch x sensor grid with a designated sink column. Construction validates
// every invariant: finite cells, sorted unique epochs and ids, target present,
// at least 2 rows and 2 columns.
class data_matrix {
public:
  data_matrix(std::vector<std::int64_t> epochs, std::vector<sensor_id> sensor_ids,
              Eigen::MatrixXd values, sensor_id target_id);

  const std::vector<std::int64_t>& epochs() const noexcept { return epochs_; }
  const std::vector<sensor_id>& sensor_ids() const noexcept { return sensor_ids_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  sensor_id target_id() const noexcept { return target_id_; }

  std::size_t rows() const noexcept { return epochs_.size(); }
  std::size_t cols() const noexcept { return sensor_ids_.size(); }

  bool has_sensor(sensor_id id) const noexcept;
  // Throws contract_error for unknown ids.
  std::size_t column_index(sensor_id id) const;
  Eigen::VectorXd column(sensor_id id) const;
  Eigen::VectorXd target() const { return column(target_id_); }

  // All sensor ids except the target, ascending.
  std::vector<sensor_id> feature_ids() const;

  // Same columns, a subset of rows (in the given order).
  data_matrix select_rows(const std::vector<std::size_t>& rows) const;

private:
  std::vector<std::int64_t> epochs_;
  std::vector<sensor_id> sensor_ids_;
  Eigen::MatrixXd values_;
  sensor_id target_id_;
};

struct dropped_sensor {
  sensor_id id = 0;
  std::size_t samples = 0;
};

struct ingest_report {
  std::size_t readings = 0;
  std::size_t duplicates = 0;
  std::vector<dropped_sensor> dropped;
  std::size_t rows_dropped = 0;
  std::size_t cells_filled = 0;
  // forward_fill cells with no earlier value, filled with the column mean
  std::size_t mean_fallback_cells = 0;
};

struct aligned_matrix {
  data_matrix matrix;
  ingest_report report;
};

// Throws io_error if the stream is unreadable, empty_dataset_error when no
// line is well-formed.
parsed_log parse_sensor_log(std::istream& in);

aligned_matrix align_epochs(const std::vector<sensor_reading>& readings, measurement_field field,
                            gap_policy policy, sensor_id target_id,
                            std::size_t min_samples = kDefaultMinSamples);

data_matrix take_window(const data_matrix& matrix, std::size_t start_row, std::size_t n_rows);

std::vector<sensor_position> load_positions(std::istream& in);

// Comma-delimited, header "epoch,<id>,...", one row per epoch.
void write_matrix(std::ostream& out, const data_matrix& matrix);
data_matrix read_matrix(std::istream& in, sensor_id target_id);

}  // namespace wsnsel
