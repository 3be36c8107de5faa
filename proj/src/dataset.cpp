#include "wsnsel/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "wsnsel/errors.hpp"
#include "wsnsel/format.hpp"

namespace wsnsel {

namespace {

template <typename T>
bool parse_number(std::string_view token, T& out) {
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

bool parse_finite(std::string_view token, double& out) {
  return parse_number(token, out) && std::isfinite(out);
}

// YYYY-MM-DD
bool parse_date(std::string_view token, std::chrono::year_month_day& out) {
  auto parts = split(token, '-');
  if (parts.size() != 3) return false;
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  if (!parse_number(std::string_view(parts[0]), y) || !parse_number(std::string_view(parts[1]), m) ||
      !parse_number(std::string_view(parts[2]), d))
    return false;
  out = std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  return out.ok();
}

// HH:MM:SS[.ffffff...], fraction truncated to microseconds
bool parse_time(std::string_view token, std::chrono::microseconds& out) {
  auto parts = split(token, ':');
  if (parts.size() != 3) return false;
  int h = 0;
  int m = 0;
  if (!parse_number(std::string_view(parts[0]), h) || !parse_number(std::string_view(parts[1]), m))
    return false;
  std::string_view sec_text = parts[2];
  std::string_view frac;
  if (auto dot = sec_text.find('.'); dot != std::string_view::npos) {
    frac = sec_text.substr(dot + 1);
    sec_text = sec_text.substr(0, dot);
  }
  int s = 0;
  if (!parse_number(sec_text, s)) return false;
  if (h < 0 || h > 23 || m < 0 || m > 59 || s < 0 || s > 60) return false;
  std::int64_t micros = 0;
  int digits = 0;
  for (char c : frac) {
    if (c < '0' || c > '9') return false;
    if (digits < 6) {
      micros = micros * 10 + (c - '0');
      ++digits;
    }
  }
  while (digits < 6) {
    micros *= 10;
    ++digits;
  }
  out = std::chrono::hours{h} + std::chrono::minutes{m} + std::chrono::seconds{s} +
        std::chrono::microseconds{micros};
  return true;
}

std::optional<sensor_reading> parse_line(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos >= line.size()) break;
    auto end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    tokens.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  if (tokens.size() < 4 || tokens.size() > 8) return std::nullopt;

  sensor_reading r;
  if (!parse_date(tokens[0], r.date)) return std::nullopt;
  if (!parse_time(tokens[1], r.time_of_day)) return std::nullopt;
  if (!parse_number(tokens[2], r.epoch) || r.epoch < 0) return std::nullopt;
  if (!parse_number(tokens[3], r.mote_id) || r.mote_id < 1 || r.mote_id > kMaxMoteId)
    return std::nullopt;

  std::optional<double>* fields[] = {&r.temperature, &r.humidity, &r.light, &r.voltage};
  for (std::size_t i = 4; i < tokens.size(); ++i) {
    double v = 0.0;
    if (!parse_finite(tokens[i], v)) return std::nullopt;
    *fields[i - 4] = v;
  }
  return r;
}

}  // namespace

measurement_field parse_field(std::string_view name) {
  if (name == "temperature") return measurement_field::temperature;
  if (name == "humidity") return measurement_field::humidity;
  if (name == "light") return measurement_field::light;
  if (name == "voltage") return measurement_field::voltage;
  throw contract_error("unknown measurement field '" + std::string(name) + "'");
}

std::string_view to_string(measurement_field field) {
  switch (field) {
    case measurement_field::temperature: return "temperature";
    case measurement_field::humidity: return "humidity";
    case measurement_field::light: return "light";
    case measurement_field::voltage: return "voltage";
  }
  return "?";
}

gap_policy parse_gap_policy(std::string_view name) {
  if (name == "drop_row") return gap_policy::drop_row;
  if (name == "forward_fill") return gap_policy::forward_fill;
  if (name == "column_mean") return gap_policy::column_mean;
  throw contract_error("unknown gap policy '" + std::string(name) + "'");
}

std::string_view to_string(gap_policy policy) {
  switch (policy) {
    case gap_policy::drop_row: return "drop_row";
    case gap_policy::forward_fill: return "forward_fill";
    case gap_policy::column_mean: return "column_mean";
  }
  return "?";
}

std::optional<double> sensor_reading::value(measurement_field field) const {
  switch (field) {
    case measurement_field::temperature: return temperature;
    case measurement_field::humidity: return humidity;
    case measurement_field::light: return light;
    case measurement_field::voltage: return voltage;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

data_matrix::data_matrix(std::vector<std::int64_t> epochs, std::vector<sensor_id> sensor_ids,
                         Eigen::MatrixXd values, sensor_id target_id)
    : epochs_(std::move(epochs)),
      sensor_ids_(std::move(sensor_ids)),
      values_(std::move(values)),
      target_id_(target_id) {
  if (epochs_.size() < 2 || sensor_ids_.size() < 2)
    throw dimension_error("data matrix needs at least 2 rows and 2 columns, got " +
                          std::to_string(epochs_.size()) + "x" + std::to_string(sensor_ids_.size()));
  if (static_cast<std::size_t>(values_.rows()) != epochs_.size() ||
      static_cast<std::size_t>(values_.cols()) != sensor_ids_.size())
    throw dimension_error("data matrix value grid does not match its labels");
  if (!std::is_sorted(epochs_.begin(), epochs_.end()) ||
      std::adjacent_find(epochs_.begin(), epochs_.end()) != epochs_.end())
    throw contract_error("data matrix epochs must be strictly ascending");
  if (!std::is_sorted(sensor_ids_.begin(), sensor_ids_.end()) ||
      std::adjacent_find(sensor_ids_.begin(), sensor_ids_.end()) != sensor_ids_.end())
    throw contract_error("data matrix sensor ids must be strictly ascending");
  if (!has_sensor(target_id_))
    throw contract_error("target sensor " + std::to_string(target_id_) + " is not a matrix column");
  if (!values_.allFinite()) throw contract_error("data matrix contains missing or non-finite cells");
}

bool data_matrix::has_sensor(sensor_id id) const noexcept {
  return std::binary_search(sensor_ids_.begin(), sensor_ids_.end(), id);
}

std::size_t data_matrix::column_index(sensor_id id) const {
  auto it = std::lower_bound(sensor_ids_.begin(), sensor_ids_.end(), id);
  if (it == sensor_ids_.end() || *it != id)
    throw contract_error("sensor " + std::to_string(id) + " is not a matrix column");
  return static_cast<std::size_t>(it - sensor_ids_.begin());
}

Eigen::VectorXd data_matrix::column(sensor_id id) const {
  return values_.col(static_cast<Eigen::Index>(column_index(id)));
}

std::vector<sensor_id> data_matrix::feature_ids() const {
  std::vector<sensor_id> ids;
  ids.reserve(sensor_ids_.size() - 1);
  for (auto id : sensor_ids_)
    if (id != target_id_) ids.push_back(id);
  return ids;
}

data_matrix data_matrix::select_rows(const std::vector<std::size_t>& rows) const {
  std::vector<std::int64_t> epochs;
  epochs.reserve(rows.size());
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), values_.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= epochs_.size()) throw bounds_error("row index out of range");
    epochs.push_back(epochs_[rows[i]]);
    values.row(static_cast<Eigen::Index>(i)) = values_.row(static_cast<Eigen::Index>(rows[i]));
  }
  return data_matrix(std::move(epochs), sensor_ids_, std::move(values), target_id_);
}

// ---------------------------------------------------------------------------

parsed_log parse_sensor_log(std::istream& in) {
  if (!in) throw io_error("sensor log stream is not readable");
  parsed_log log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (auto r = parse_line(line)) {
      log.readings.push_back(*r);
    } else {
      ++log.skipped_lines;
      log.skipped_line_numbers.push_back(line_no);
    }
  }
  if (in.bad()) throw io_error("read error in sensor log");
  if (log.readings.empty()) throw empty_dataset_error("sensor log contains no well-formed lines");
  return log;
}

aligned_matrix align_epochs(const std::vector<sensor_reading>& readings, measurement_field field,
                            gap_policy policy, sensor_id target_id, std::size_t min_samples) {
  if (readings.empty()) throw empty_dataset_error("no readings to align");

  ingest_report report;
  report.readings = readings.size();

  // (mote, epoch) -> value; last occurrence wins
  std::map<sensor_id, std::map<std::int64_t, double>> series;
  for (const auto& r : readings) {
    auto v = r.value(field);
    if (!v) continue;
    auto [it, inserted] = series[r.mote_id].insert_or_assign(r.epoch, *v);
    if (!inserted) ++report.duplicates;
  }

  std::vector<sensor_id> kept;
  for (const auto& [id, values] : series) {
    if (values.size() < min_samples)
      report.dropped.push_back({id, values.size()});
    else
      kept.push_back(id);
  }
  if (kept.empty())
    throw empty_dataset_error("every sensor has fewer than " + std::to_string(min_samples) +
                              " " + std::string(to_string(field)) + " samples");
  if (!std::binary_search(kept.begin(), kept.end(), target_id))
    throw empty_dataset_error("target sensor " + std::to_string(target_id) +
                              " has no usable " + std::string(to_string(field)) + " samples");

  std::set<std::int64_t> epoch_set;
  for (auto id : kept)
    for (const auto& [epoch, v] : series[id]) epoch_set.insert(epoch);
  std::vector<std::int64_t> epochs(epoch_set.begin(), epoch_set.end());

  const auto n_rows = static_cast<Eigen::Index>(epochs.size());
  const auto n_cols = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd grid(n_rows, n_cols);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> present(n_rows, n_cols);
  present.setConstant(false);
  for (Eigen::Index c = 0; c < n_cols; ++c) {
    const auto& s = series[kept[static_cast<std::size_t>(c)]];
    Eigen::Index r = 0;
    for (const auto& [epoch, v] : s) {
      while (epochs[static_cast<std::size_t>(r)] != epoch) ++r;
      grid(r, c) = v;
      present(r, c) = true;
    }
  }

  if (policy == gap_policy::drop_row) {
    std::vector<std::int64_t> full_epochs;
    std::vector<Eigen::Index> full_rows;
    for (Eigen::Index r = 0; r < n_rows; ++r) {
      if (present.row(r).all()) {
        full_rows.push_back(r);
        full_epochs.push_back(epochs[static_cast<std::size_t>(r)]);
      }
    }
    report.rows_dropped = static_cast<std::size_t>(n_rows) - full_rows.size();
    if (full_rows.size() < 2)
      throw empty_dataset_error("drop_row leaves fewer than 2 complete epochs");
    Eigen::MatrixXd out(static_cast<Eigen::Index>(full_rows.size()), n_cols);
    for (std::size_t i = 0; i < full_rows.size(); ++i)
      out.row(static_cast<Eigen::Index>(i)) = grid.row(full_rows[i]);
    return {data_matrix(std::move(full_epochs), std::move(kept), std::move(out), target_id), report};
  }

  for (Eigen::Index c = 0; c < n_cols; ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (Eigen::Index r = 0; r < n_rows; ++r) {
      if (present(r, c)) {
        sum += grid(r, c);
        ++count;
      }
    }
    const double mean = sum / static_cast<double>(count);
    bool seen = false;
    for (Eigen::Index r = 0; r < n_rows; ++r) {
      if (present(r, c)) {
        seen = true;
        continue;
      }
      ++report.cells_filled;
      if (policy == gap_policy::forward_fill && seen) {
        grid(r, c) = grid(r - 1, c);
      } else {
        if (policy == gap_policy::forward_fill) ++report.mean_fallback_cells;
        grid(r, c) = mean;
      }
    }
  }
  return {data_matrix(std::move(epochs), std::move(kept), std::move(grid), target_id), report};
}

data_matrix take_window(const data_matrix& matrix, std::size_t start_row, std::size_t n_rows) {
  if (start_row > matrix.rows() || n_rows > matrix.rows() - start_row)
    throw bounds_error("window [" + std::to_string(start_row) + ", +" + std::to_string(n_rows) +
                       ") exceeds " + std::to_string(matrix.rows()) + " rows");
  const auto start = static_cast<Eigen::Index>(start_row);
  const auto n = static_cast<Eigen::Index>(n_rows);
  std::vector<std::int64_t> epochs(matrix.epochs().begin() + start, matrix.epochs().begin() + start + n);
  Eigen::MatrixXd values = matrix.values().middleRows(start, n);
  return data_matrix(std::move(epochs), matrix.sensor_ids(), std::move(values), matrix.target_id());
}

std::vector<sensor_position> load_positions(std::istream& in) {
  if (!in) throw io_error("positions stream is not readable");
  std::vector<sensor_position> positions;
  std::set<sensor_id> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    std::istringstream ls{std::string(text)};
    std::string id_tok, x_tok, y_tok, extra;
    if (!(ls >> id_tok >> x_tok >> y_tok) || (ls >> extra))
      throw parse_error("expected 'mote_id x y'", line_no);
    sensor_position p;
    if (!parse_number(std::string_view(id_tok), p.mote_id) || p.mote_id < 1)
      throw parse_error("bad mote id '" + id_tok + "'", line_no);
    if (!parse_finite(x_tok, p.x)) throw parse_error("bad x coordinate '" + x_tok + "'", line_no);
    if (!parse_finite(y_tok, p.y)) throw parse_error("bad y coordinate '" + y_tok + "'", line_no);
    if (!seen.insert(p.mote_id).second)
      throw parse_error("duplicate mote id " + std::to_string(p.mote_id), line_no);
    positions.push_back(p);
  }
  if (in.bad()) throw io_error("read error in positions file");
  return positions;
}

void write_matrix(std::ostream& out, const data_matrix& matrix) {
  out << "epoch";
  for (auto id : matrix.sensor_ids()) out << ',' << id;
  out << '\n';
  const auto& v = matrix.values();
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    out << matrix.epochs()[r];
    for (Eigen::Index c = 0; c < v.cols(); ++c)
      out << ',' << format_double(v(static_cast<Eigen::Index>(r), c));
    out << '\n';
  }
}

data_matrix read_matrix(std::istream& in, sensor_id target_id) {
  if (!in) throw io_error("matrix stream is not readable");
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw empty_dataset_error("matrix file is empty");
  auto header = split(trim(line), ',');
  if (header.size() < 2 || trim(header[0]) != "epoch")
    throw parse_error("matrix header must start with 'epoch'", line_no);
  std::vector<sensor_id> ids;
  for (std::size_t i = 1; i < header.size(); ++i) {
    sensor_id id = 0;
    if (!parse_number(trim(header[i]), id)) throw parse_error("bad sensor id '" + header[i] + "'", line_no);
    ids.push_back(id);
  }
  std::vector<std::int64_t> epochs;
  std::vector<double> cells;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = trim(line);
    if (text.empty()) continue;
    auto fields = split(text, ',');
    if (fields.size() != header.size())
      throw parse_error("expected " + std::to_string(header.size()) + " fields", line_no);
    std::int64_t epoch = 0;
    if (!parse_number(trim(fields[0]), epoch)) throw parse_error("bad epoch", line_no);
    epochs.push_back(epoch);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v = 0.0;
      if (!parse_finite(trim(fields[i]), v)) throw parse_error("bad value '" + fields[i] + "'", line_no);
      cells.push_back(v);
    }
  }
  if (epochs.empty()) throw empty_dataset_error("matrix file has no rows");
  Eigen::MatrixXd values(static_cast<Eigen::Index>(epochs.size()), static_cast<Eigen::Index>(ids.size()));
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < values.rows(); ++r)
    for (Eigen::Index c = 0; c < values.cols(); ++c) values(r, c) = cells[k++];
  return data_matrix(std::move(epochs), std::move(ids), std::move(values), target_id);
}

}  // namespace wsnsel
