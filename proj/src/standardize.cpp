#include "encergy/standardize.hpp"

#include <cmath>

#include "encergy/error.hpp"

namespace encergy {

StandardizationStats compute_standardization(const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    StandardizationStats stats;
    stats.mean = Eigen::VectorXd::Zero(p);
    stats.scale = Eigen::VectorXd::Ones(p);
    if (n < 1) fail("TooFewSamples", "cannot standardize an empty design");

    for (Eigen::Index j = 0; j < p; ++j) {
        const double mu = X.col(j).mean();
        double sd = 0.0;
        if (n > 1) {
            sd = std::sqrt((X.col(j).array() - mu).square().sum() /
                           static_cast<double>(n - 1));
        }
        // Columns that are constant (up to rounding) pass through unchanged.
        if (sd <= 1e-12 * std::max(1.0, std::fabs(mu))) {
            stats.mean(j) = 0.0;
            stats.scale(j) = 1.0;
        } else {
            stats.mean(j) = mu;
            stats.scale(j) = sd;
        }
    }
    return stats;
}

Eigen::MatrixXd standardize(const StandardizationStats& stats, const Eigen::MatrixXd& X) {
    if (X.cols() != stats.mean.size())
        fail("LengthMismatch", "standardization dimension mismatch");
    return (X.rowwise() - stats.mean.transpose()).array().rowwise() /
           stats.scale.transpose().array();
}

Eigen::VectorXd standardize(const StandardizationStats& stats, const Eigen::VectorXd& x) {
    if (x.size() != stats.mean.size())
        fail("LengthMismatch", "standardization dimension mismatch");
    return (x - stats.mean).cwiseQuotient(stats.scale);
}

} // namespace encergy
