#pragma once

#include <cstddef>
#include <vector>

namespace hrafl {

struct GeoMedConfig {
  double tolerance = 1e-10;
  std::size_t max_iterations = 1000;
  // Distances below this are floored in the reweighting step.
  double epsilon = 1e-12;

  void validate() const;
  friend bool operator==(const GeoMedConfig&, const GeoMedConfig&) = default;
};

struct GeoMedSolution {
  std::vector<double> point;
  // Normalized Weiszfeld weights at the returned point.
  std::vector<double> weights;
  std::size_t iterations = 0;
  bool converged = false;
};

// Smoothed Weiszfeld iteration started from the arithmetic mean.
GeoMedSolution solve_geometric_median(const std::vector<std::vector<double>>& points,
                                      const GeoMedConfig& cfg = {});

std::vector<double> geometric_median(const std::vector<std::vector<double>>& points,
                                     const GeoMedConfig& cfg = {});

// Sum of Euclidean distances from `x` to every point.
double geometric_median_objective(const std::vector<std::vector<double>>& points,
                                  const std::vector<double>& x);

double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace hrafl
