#include "hrafl/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "hrafl/error.hpp"

namespace hrafl {

ConfusionCounts confusion(std::span<const double> probs, std::span<const double> labels,
                          double threshold) {
  if (probs.size() != labels.size()) throw InvalidArgument("confusion: length mismatch");
  if (probs.empty()) throw InvalidArgument("confusion: empty input");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InvalidArgument("confusion: threshold must lie in (0,1)");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool predicted = probs[i] >= threshold;
    const bool actual = labels[i] == 1.0;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) return 0.0;
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

double precision(const ConfusionCounts& c) {
  const std::size_t denom = c.tp + c.fp;
  return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double recall(const ConfusionCounts& c) {
  const std::size_t denom = c.tp + c.fn;
  return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double f1_score(const ConfusionCounts& c) {
  const double p = precision(c);
  const double r = recall(c);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double roc_auc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("roc_auc: length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of 1-based ranks of the positives, ties sharing their average rank.
  // Doubled so that half ranks stay integral.
  double twice_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double twice_avg_rank = static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1.0) {
        twice_rank_sum += twice_avg_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw InvalidArgument("roc_auc: undefined with a single class present");
  }
  const double p = static_cast<double>(positives);
  const double u = 0.5 * (twice_rank_sum - p * (p + 1.0));
  return u / (p * static_cast<double>(negatives));
}

}  // namespace hrafl
