#include "encergy/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "encergy/error.hpp"

namespace encergy {

namespace {

// Continued fraction for the incomplete beta function, modified Lentz.
double incbeta_cf(double x, double a, double b) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-15;
    constexpr int kMaxTerms = 500;

    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;

    for (int m = 1; m <= kMaxTerms; ++m) {
        const double m2 = 2.0 * m;
        double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 + num * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + num / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;

        num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 + num * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + num / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) return h;
    }
    return h; // converged enough for the accuracies promised here
}

} // namespace

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || std::isnan(x))
        fail("NonFiniteInput", "regularized_incomplete_beta requires a > 0, b > 0, finite x");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;

    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // Symmetric split keeps the continued fraction in its fast-converging region.
    if (x < (a + 1.0) / (a + b + 2.0)) return front * incbeta_cf(x, a, b) / a;
    return 1.0 - front * incbeta_cf(1.0 - x, b, a) / b;
}

double student_t_cdf(double t, int df) {
    if (df < 1) fail("InvalidProbability", "degrees of freedom must be >= 1");
    if (std::isnan(t)) fail("NonFiniteInput", "student_t_cdf: t is NaN");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double v = static_cast<double>(df);
    const double x = v / (v + t * t);
    const double tail = 0.5 * regularized_incomplete_beta(x, 0.5 * v, 0.5);
    return t >= 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, int df) {
    if (!(p > 0.0) || !(p < 1.0)) fail("InvalidProbability", "p must be inside (0, 1)");
    if (df < 1) fail("InvalidProbability", "degrees of freedom must be >= 1");
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -student_t_quantile(1.0 - p, df);

    // Bracket the root of cdf(t) = p, then bisect to double precision.
    double lo = 0.0;
    double hi = 1.0;
    while (student_t_cdf(hi, df) < p) {
        hi *= 2.0;
        if (hi > 1e300) return std::numeric_limits<double>::infinity();
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, df) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

double mean(std::span<const double> values) {
    if (values.empty()) fail("TooFewValues", "mean of an empty sequence");
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
    const std::size_t m = values.size();
    if (m < 2) fail("TooFewValues", "sample variance needs at least 2 values");
    const double mu = mean(values);
    double s = 0.0;
    for (double v : values) s += (v - mu) * (v - mu);
    return s / static_cast<double>(m - 1);
}

double sample_stddev(std::span<const double> values) {
    return std::sqrt(sample_variance(values));
}

double median(std::vector<double> values) {
    if (values.empty()) fail("TooFewValues", "median of an empty sequence");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    if (values.size() % 2 == 1) return values[mid];
    const double hi = values[mid];
    const double lo = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lo + hi);
}

} // namespace encergy
