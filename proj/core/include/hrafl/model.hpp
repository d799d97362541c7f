#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hrafl/data.hpp"
#include "hrafl/matrix.hpp"

namespace hrafl {

// Logistic-regression parameters: weights plus scalar bias.
struct ModelParams {
  std::vector<double> w;
  double b = 0.0;

  static ModelParams zeros(std::size_t d) { return {std::vector<double>(d, 0.0), 0.0}; }
  std::size_t dim() const noexcept { return w.size(); }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct Gradients {
  std::vector<double> w;
  double b = 0.0;
};

struct TrainConfig {
  double eta0 = 0.1;
  double gamma = 0.998;
  std::size_t epochs = 16;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Logistic function, evaluated without overflow and clamped to the open
// interval (0,1) so that saturated inputs never report exactly 0 or 1.
double sigmoid(double z);

std::vector<double> predict_proba(const ModelParams& params, const Matrix& X);

// Mean binary cross-entropy with probabilities clipped to [kLossEpsilon, 1-kLossEpsilon].
inline constexpr double kLossEpsilon = 1e-12;
double bce_loss(std::span<const double> probs, std::span<const double> y);

Gradients gradients(const ModelParams& params, const Matrix& X, std::span<const double> y);

// E full-batch gradient-descent epochs starting from `params`.
ModelParams train_local(const ModelParams& params, const FeatureMatrix& data,
                        const TrainConfig& config, double lr);

// eta0 * gamma^round
double lr_schedule(double eta0, double gamma, std::size_t round);

}  // namespace hrafl
