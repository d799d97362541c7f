#pragma once

#include <cstddef>
#include <span>

namespace hrafl {

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) standard deviation, 0 when n == 1
  double standard_error = 0.0;  // stddev / sqrt(n)
};

Summary summarize(std::span<const double> values);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  std::size_t dof = 0;
  // All paired differences are zero; t = 0 and p = 1 by convention.
  bool degenerate = false;
};

// Two-sided paired t-test on a - b.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Two-sided tail probability P(|T| >= |t|) for Student's t with `dof` degrees.
double student_t_two_sided_p(double t, double dof);

}  // namespace hrafl
