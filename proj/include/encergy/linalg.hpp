#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "encergy/features.hpp"

namespace encergy {

// Minimum-norm least-squares solution of A x ~ b via SVD. Directions whose
// singular value is <= rel_tol * s_max get zero weight, which keeps systems
// with collinear columns (duplicated bias after ablation) well-defined.
// Throws RankDeficientBasis when A is numerically zero.
Eigen::VectorXd min_norm_lstsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                               double rel_tol = 1e-10);

// Dense views of a dataset in feature-column order.
Eigen::MatrixXd feature_matrix(const Dataset& dataset);
Eigen::VectorXd energy_vector(const Dataset& dataset);
std::vector<std::string> sample_ids(const Dataset& dataset);

} // namespace encergy
