#pragma once

#include <cstddef>
#include <span>

namespace hrafl {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Predicted positive iff prob >= threshold.
ConfusionCounts confusion(std::span<const double> probs, std::span<const double> labels,
                          double threshold = 0.5);

// Precision and recall are 0 when their denominators are 0; F1 is then 0 too.
double accuracy(const ConfusionCounts& c);
double precision(const ConfusionCounts& c);
double recall(const ConfusionCounts& c);
double f1_score(const ConfusionCounts& c);

// Mann-Whitney AUC; a positive/negative score tie counts one half.
double roc_auc(std::span<const double> scores, std::span<const double> labels);

}  // namespace hrafl
