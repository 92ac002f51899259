#pragma once

#include <span>
#include <vector>

namespace encergy {

// Regularized incomplete beta I_x(a, b), evaluated with the modified-Lentz
// continued fraction.
double regularized_incomplete_beta(double x, double a, double b);

// CDF of Student's t with df degrees of freedom.
double student_t_cdf(double t, int df);

// Inverse CDF of Student's t. p in (0, 1), df >= 1. Root-finds the
// incomplete-beta CDF by bracketed bisection; absolute error is far below
// the 1e-6 contract for df in [1, 200].
double student_t_quantile(double p, int df);

double mean(std::span<const double> values);
double sample_variance(std::span<const double> values); // m-1 denominator
double sample_stddev(std::span<const double> values);
double median(std::vector<double> values);

} // namespace encergy
