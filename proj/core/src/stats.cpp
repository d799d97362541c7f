#include "hrafl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hrafl/error.hpp"

namespace hrafl {

namespace {

constexpr double kFractionTolerance = 1e-15;
constexpr int kMaxFractionTerms = 500;
constexpr double kTiny = 1e-300;

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxFractionTerms; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kFractionTolerance) break;
  }
  return h;
}

}  // namespace

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("summarize: empty input");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  Summary s;
  s.mean = sum / n;
  if (values.size() == 1) return s;
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / (n - 1.0));
  s.standard_error = s.stddev / std::sqrt(n);
  return s;
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw InvalidArgument("incomplete_beta: a and b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("incomplete_beta: x must lie in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The fraction converges fastest on the side of the symmetry point.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
  if (!(dof > 0.0)) throw InvalidArgument("student_t: degrees of freedom must be > 0");
  if (std::isinf(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return std::clamp(incomplete_beta(0.5 * dof, 0.5, x), 0.0, 1.0);
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("paired_t_test: length mismatch");
  if (a.size() < 2) throw InvalidArgument("paired_t_test: need at least two pairs");
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];

  TTestResult result;
  result.dof = n - 1;
  if (std::all_of(diff.begin(), diff.end(), [](double d) { return d == 0.0; })) {
    result.degenerate = true;
    return result;
  }
  const Summary s = summarize(diff);
  if (s.stddev == 0.0) {
    // Constant non-zero difference: infinitely significant.
    result.t = s.mean > 0.0 ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
    result.p = 0.0;
    return result;
  }
  result.t = s.mean * std::sqrt(static_cast<double>(n)) / s.stddev;
  result.p = student_t_two_sided_p(result.t, static_cast<double>(result.dof));
  return result;
}

}  // namespace hrafl
