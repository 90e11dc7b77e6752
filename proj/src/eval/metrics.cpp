#include "hardinv/eval/metrics.hpp"

#include <cmath>
#include <vector>

#include "hardinv/common/errors.hpp"

namespace hardinv {

namespace {

void check_pair(std::span<const double> pred, std::span<const double> truth, std::size_t min_size) {
  if (pred.size() != truth.size()) {
    throw DimensionError("metrics: " + std::to_string(pred.size()) + " predictions for " +
                         std::to_string(truth.size()) + " truth values");
  }
  if (truth.size() < min_size) {
    throw DimensionError("metrics: need at least " + std::to_string(min_size) + " samples");
  }
}

bool constant(std::span<const double> v) {
  for (double x : v) {
    if (x != v.front()) return false;
  }
  return true;
}

std::vector<double> column_of(const Matrix& m, std::size_t c) {
  std::vector<double> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = m(r, c);
  return out;
}

}  // namespace

std::string_view to_string(Protocol p) { return p == Protocol::functional ? "functional" : "input-space"; }

std::string_view to_string(SplitName s) { return s == SplitName::train ? "train" : "test"; }

Protocol parse_protocol(std::string_view text) {
  if (text == "functional") return Protocol::functional;
  if (text == "input-space" || text == "input_space") return Protocol::input_space;
  throw ContractError("unknown protocol '" + std::string(text) + "' (expected functional or input-space)");
}

SplitName parse_split(std::string_view text) {
  if (text == "train") return SplitName::train;
  if (text == "test") return SplitName::test;
  throw ContractError("unknown split '" + std::string(text) + "' (expected train or test)");
}

double mean_squared_error(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred, truth, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    s += d * d;
  }
  return s / static_cast<double>(pred.size());
}

double mean_absolute_error(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred, truth, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - truth[i]);
  return s / static_cast<double>(pred.size());
}

double r2(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred, truth, 2);
  if (constant(truth)) throw UndefinedMetricError("r2: truth is constant, variance is zero");
  double mean = 0.0;
  for (double t : truth) mean += t;
  mean /= static_cast<double>(truth.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double r = truth[i] - pred[i];
    const double c = truth[i] - mean;
    ss_res += r * r;
    ss_tot += c * c;
  }
  return 1.0 - ss_res / ss_tot;
}

MetricSet scalar_metrics(std::span<const double> pred, std::span<const double> truth, Protocol protocol,
                         SplitName split) {
  MetricSet m;
  m.mse = mean_squared_error(pred, truth);
  m.mae = mean_absolute_error(pred, truth);
  if (truth.size() >= 2 && !constant(truth)) m.r2 = r2(pred, truth);
  m.n = truth.size();
  m.protocol = protocol;
  m.split = split;
  return m;
}

MetricSet column_metrics(const Matrix& pred, const Matrix& truth, Protocol protocol, SplitName split) {
  require_same_shape(pred, truth, "column_metrics");
  if (truth.rows() == 0 || truth.cols() == 0) throw DimensionError("column_metrics: empty input");
  MetricSet m;
  m.n = truth.rows();
  m.protocol = protocol;
  m.split = split;
  double r2_sum = 0.0;
  std::size_t r2_count = 0;
  for (std::size_t c = 0; c < truth.cols(); ++c) {
    const std::vector<double> p = column_of(pred, c);
    const std::vector<double> t = column_of(truth, c);
    const MetricSet col = scalar_metrics(p, t, protocol, split);
    m.mse += col.mse;
    m.mae += col.mae;
    if (col.r2) {
      r2_sum += *col.r2;
      ++r2_count;
    }
  }
  m.mse /= static_cast<double>(truth.cols());
  m.mae /= static_cast<double>(truth.cols());
  if (r2_count > 0) m.r2 = r2_sum / static_cast<double>(r2_count);
  return m;
}

}  // namespace hardinv
