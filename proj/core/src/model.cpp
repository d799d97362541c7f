#include "hrafl/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hrafl/error.hpp"

namespace hrafl {

namespace {

constexpr double kProbFloor = std::numeric_limits<double>::min();
const double kProbCeil = std::nextafter(1.0, 0.0);

void check_rows(const Matrix& X, std::size_t d, std::size_t labels) {
  if (X.cols() != d) {
    throw InvalidArgument("model: feature count " + std::to_string(X.cols()) +
                          " does not match weight dimension " + std::to_string(d));
  }
  if (X.rows() != labels) throw InvalidArgument("model: row count does not match label count");
}

// residuals e = sigmoid(Xw + b) - y
std::vector<double> residuals(const ModelParams& params, const Matrix& X,
                              std::span<const double> y) {
  std::vector<double> e(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto row = X.row(i);
    double z = params.b;
    for (std::size_t j = 0; j < row.size(); ++j) z += row[j] * params.w[j];
    e[i] = sigmoid(z) - y[i];
  }
  return e;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(eta0 > 0.0)) throw InvalidArgument("train config: eta0 must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("train config: gamma must lie in (0,1]");
  if (epochs < 1) throw InvalidArgument("train config: epochs must be >= 1");
}

double sigmoid(double z) {
  double p;
  if (z >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  return std::clamp(p, kProbFloor, kProbCeil);
}

std::vector<double> predict_proba(const ModelParams& params, const Matrix& X) {
  if (X.cols() != params.dim()) {
    throw InvalidArgument("predict_proba: feature count " + std::to_string(X.cols()) +
                          " does not match weight dimension " + std::to_string(params.dim()));
  }
  std::vector<double> p(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto row = X.row(i);
    double z = params.b;
    for (std::size_t j = 0; j < row.size(); ++j) z += row[j] * params.w[j];
    p[i] = sigmoid(z);
  }
  return p;
}

double bce_loss(std::span<const double> probs, std::span<const double> y) {
  if (probs.size() != y.size()) throw InvalidArgument("bce_loss: length mismatch");
  if (probs.empty()) throw InvalidArgument("bce_loss: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], kLossEpsilon, 1.0 - kLossEpsilon);
    total -= y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p);
  }
  return total / static_cast<double>(probs.size());
}

Gradients gradients(const ModelParams& params, const Matrix& X, std::span<const double> y) {
  if (X.rows() == 0) throw InvalidArgument("gradients: empty dataset");
  check_rows(X, params.dim(), y.size());
  const auto e = residuals(params, X, y);
  Gradients g{std::vector<double>(params.dim(), 0.0), 0.0};
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto row = X.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) g.w[j] += row[j] * e[i];
    g.b += e[i];
  }
  const double inv_n = 1.0 / static_cast<double>(X.rows());
  for (double& v : g.w) v *= inv_n;
  g.b *= inv_n;
  return g;
}

ModelParams train_local(const ModelParams& params, const FeatureMatrix& data,
                        const TrainConfig& config, double lr) {
  if (!(lr >= 0.0)) throw InvalidArgument("train_local: learning rate must be >= 0");
  ModelParams local = params;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto g = gradients(local, data.X, data.y);
    for (std::size_t j = 0; j < local.w.size(); ++j) local.w[j] -= lr * g.w[j];
    local.b -= lr * g.b;
  }
  return local;
}

double lr_schedule(double eta0, double gamma, std::size_t round) {
  return eta0 * std::pow(gamma, static_cast<double>(round));
}

}  // namespace hrafl
