#include "hrafl/geometric_median.hpp"

#include <algorithm>
#include <cmath>

#include "hrafl/error.hpp"

namespace hrafl {

void GeoMedConfig::validate() const {
  if (!(tolerance > 0.0)) throw InvalidArgument("geomed: tolerance must be > 0");
  if (max_iterations < 1) throw InvalidArgument("geomed: max_iterations must be >= 1");
  if (!(epsilon > 0.0)) throw InvalidArgument("geomed: epsilon must be > 0");
}

double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

double geometric_median_objective(const std::vector<std::vector<double>>& points,
                                  const std::vector<double>& x) {
  double total = 0.0;
  for (const auto& p : points) total += euclidean_distance(p, x);
  return total;
}

GeoMedSolution solve_geometric_median(const std::vector<std::vector<double>>& points,
                                      const GeoMedConfig& cfg) {
  if (points.empty()) throw InvalidArgument("geometric_median: empty input");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw InvalidArgument("geometric_median: points differ in dimension");
  }
  const std::size_t n = points.size();

  GeoMedSolution sol;
  sol.point.assign(dim, 0.0);
  for (const auto& p : points) {
    for (std::size_t k = 0; k < dim; ++k) sol.point[k] += p[k];
  }
  for (double& v : sol.point) v /= static_cast<double>(n);

  std::vector<double> weights(n);
  std::vector<double> next(dim);
  auto reweight = [&](const std::vector<double>& x) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      weights[j] = 1.0 / std::max(euclidean_distance(points[j], x), cfg.epsilon);
      total += weights[j];
    }
    return total;
  };

  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    const double total = reweight(sol.point);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < dim; ++k) next[k] += weights[j] * points[j][k];
    }
    for (double& v : next) v /= total;
    const double movement = euclidean_distance(next, sol.point);
    sol.point.swap(next);
    sol.iterations = it + 1;
    if (movement < cfg.tolerance) {
      sol.converged = true;
      break;
    }
  }

  const double total = reweight(sol.point);
  sol.weights.resize(n);
  for (std::size_t j = 0; j < n; ++j) sol.weights[j] = weights[j] / total;
  return sol;
}

std::vector<double> geometric_median(const std::vector<std::vector<double>>& points,
                                     const GeoMedConfig& cfg) {
  return solve_geometric_median(points, cfg).point;
}

}  // namespace hrafl
