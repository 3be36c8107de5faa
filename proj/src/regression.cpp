#include "wsnsel/regression.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/QR>

#include "wsnsel/errors.hpp"
#include "wsnsel/format.hpp"
#include "wsnsel/stats.hpp"

namespace wsnsel {

namespace {

void check_features(const data_matrix& matrix, const std::vector<sensor_id>& features) {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i] == matrix.target_id())
      throw contract_error("feature list contains the target " + std::to_string(features[i]));
    if (!matrix.has_sensor(features[i]))
      throw contract_error("sensor " + std::to_string(features[i]) + " is not a matrix column");
    for (std::size_t j = 0; j < i; ++j)
      if (features[j] == features[i])
        throw contract_error("feature " + std::to_string(features[i]) + " listed twice");
  }
  if (matrix.rows() < features.size() + 2)
    throw underdetermined_error("fit needs at least " + std::to_string(features.size() + 2) + " rows for " +
                                std::to_string(features.size()) + " features, got " +
                                std::to_string(matrix.rows()));
}

double parse_double(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw parse_error("bad number '" + std::string(text) + "'", 0);
  return v;
}

}  // namespace

double aic_of(double rss, std::size_t n, std::size_t p) {
  if (p < 1 || n <= p)
    throw contract_error("aic_of needs n > p >= 1, got n=" + std::to_string(n) + " p=" + std::to_string(p));
  if (!(rss >= 0.0)) throw contract_error("aic_of: negative rss");
  if (rss == 0.0) return -std::numeric_limits<double>::infinity();
  const auto dn = static_cast<double>(n);
  return dn * std::log(rss / dn) + 2.0 * static_cast<double>(p);
}

linear_model fit_ols(const data_matrix& matrix, const std::vector<sensor_id>& features) {
  check_features(matrix, features);
  const auto n = static_cast<Eigen::Index>(matrix.rows());
  const auto p = static_cast<Eigen::Index>(features.size());

  const Eigen::VectorXd y = matrix.target();
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index j = 0; j < p; ++j) x.col(j) = matrix.column(features[static_cast<std::size_t>(j)]);

  const double y_mean = mean(y);
  Eigen::VectorXd x_mean(p);
  for (Eigen::Index j = 0; j < p; ++j) x_mean[j] = mean(x.col(j));

  linear_model model;
  model.target_id = matrix.target_id();
  model.attribute_ids = features;
  model.n_train = matrix.rows();
  model.coefficients = Eigen::VectorXd::Zero(p);

  if (p > 0) {
    const Eigen::MatrixXd xc = x.rowwise() - x_mean.transpose();
    const Eigen::VectorXd yc = y.array() - y_mean;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(kRankTolerance);
    cod.compute(xc);
    model.coefficients = cod.solve(yc);
  }
  model.intercept = y_mean - x_mean.dot(model.coefficients);

  const Eigen::VectorXd residual = y - ((x * model.coefficients).array() + model.intercept).matrix();
  model.rss = residual.squaredNorm();
  model.aic = aic_of(model.rss, model.n_train, features.size() + 1);
  return model;
}

linear_model stepwise_eliminate(const data_matrix& matrix, const std::vector<sensor_id>& features) {
  const auto start = std::chrono::steady_clock::now();

  linear_model model = fit_ols(matrix, features);
  while (model.attribute_ids.size() > 1) {
    std::size_t weakest = 0;
    double weakest_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < model.attribute_ids.size(); ++i) {
      const double s = sample_stddev(matrix.column(model.attribute_ids[i]));
      const double standardized = std::abs(model.coefficients[static_cast<Eigen::Index>(i)] * s);
      const bool better = standardized < weakest_value ||
                          (standardized == weakest_value &&
                           model.attribute_ids[i] < model.attribute_ids[weakest]);
      if (better) {
        weakest = i;
        weakest_value = standardized;
      }
    }
    std::vector<sensor_id> reduced = model.attribute_ids;
    reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(weakest));
    linear_model candidate = fit_ols(matrix, reduced);
    if (!(candidate.aic < model.aic)) break;
    model = std::move(candidate);
  }

  model.build_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return model;
}

double predict(const linear_model& model, const std::map<sensor_id, double>& row) {
  double y = model.intercept;
  for (std::size_t i = 0; i < model.attribute_ids.size(); ++i) {
    auto it = row.find(model.attribute_ids[i]);
    if (it == row.end())
      throw contract_error("predict: row lacks attribute " + std::to_string(model.attribute_ids[i]));
    y += model.coefficients[static_cast<Eigen::Index>(i)] * it->second;
  }
  return y;
}

Eigen::VectorXd predict(const linear_model& model, const data_matrix& matrix) {
  Eigen::VectorXd out = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(matrix.rows()), model.intercept);
  for (std::size_t i = 0; i < model.attribute_ids.size(); ++i)
    out += model.coefficients[static_cast<Eigen::Index>(i)] * matrix.column(model.attribute_ids[i]);
  return out;
}

void write_model(std::ostream& out, const linear_model& model) {
  out << "target_id=" << model.target_id << ",intercept=" << format_double(model.intercept)
      << ",aic=" << format_double(model.aic) << ",n_train=" << model.n_train << '\n';
  for (std::size_t i = 0; i < model.attribute_ids.size(); ++i)
    out << model.attribute_ids[i] << ',' << format_double(model.coefficients[static_cast<Eigen::Index>(i)])
        << '\n';
}

linear_model read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw parse_error("empty model file", 1);
  linear_model model;
  bool have[4] = {false, false, false, false};
  for (const auto& item : split(trim(line), ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw parse_error("expected key=value in model header", 1);
    auto key = trim(std::string_view(item).substr(0, eq));
    auto value = std::string_view(item).substr(eq + 1);
    if (key == "target_id") {
      model.target_id = static_cast<sensor_id>(parse_double(value));
      have[0] = true;
    } else if (key == "intercept") {
      model.intercept = parse_double(value);
      have[1] = true;
    } else if (key == "aic") {
      model.aic = parse_double(value);
      have[2] = true;
    } else if (key == "n_train") {
      model.n_train = static_cast<std::size_t>(parse_double(value));
      have[3] = true;
    }
  }
  if (!(have[0] && have[1] && have[2] && have[3])) throw parse_error("incomplete model header", 1);

  std::vector<double> coefs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = trim(line);
    if (text.empty()) continue;
    auto fields = split(text, ',');
    if (fields.size() != 2) throw parse_error("expected 'sensor_id,coefficient'", line_no);
    model.attribute_ids.push_back(static_cast<sensor_id>(parse_double(fields[0])));
    coefs.push_back(parse_double(fields[1]));
  }
  model.coefficients = Eigen::Map<Eigen::VectorXd>(coefs.data(), static_cast<Eigen::Index>(coefs.size()));
  return model;
}

}  // namespace wsnsel
