#pragma once

#include <Eigen/Dense>

namespace encergy {

// Per-column shift/scale applied before any kernel or basis computation.
// Columns that are constant in training (notably the bias) get mean 0 and
// scale 1 so they pass through unchanged.
struct StandardizationStats {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;
};

StandardizationStats compute_standardization(const Eigen::MatrixXd& X);

Eigen::MatrixXd standardize(const StandardizationStats& stats, const Eigen::MatrixXd& X);
Eigen::VectorXd standardize(const StandardizationStats& stats, const Eigen::VectorXd& x);

} // namespace encergy
