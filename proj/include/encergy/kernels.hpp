#pragma once

#include <Eigen/Dense>

namespace encergy {

// Exponential-kernel hyperparameters.
struct Hyperparams {
    double sigma_f2 = 1.0;     // signal variance, > 0
    double length_scale = 1.0; // characteristic length scale, > 0
    double sigma_n2 = 0.0;     // noise variance, >= 0
};

void validate_hyperparams(const Hyperparams& hp);

// k(xp, xq) = sigma_f2 * exp(-d / l) + sigma_n2 * [same_sample], with d the
// Euclidean distance between the inputs.
double kernel(const Eigen::VectorXd& xp, const Eigen::VectorXd& xq,
              const Hyperparams& hp, bool same_sample);

// Pairwise Euclidean distances between rows of X. The unsuffixed variant is
// the OpenMP production path; the serial one is the reference the tests and
// the benchmark compare against. Both mirror the upper triangle, so results
// are exactly symmetric and identical between the two paths.
Eigen::MatrixXd distance_matrix(const Eigen::MatrixXd& X);
Eigen::MatrixXd distance_matrix_serial(const Eigen::MatrixXd& X);

// K = sigma_f2 * exp(-D / l) + sigma_n2 * I from precomputed distances.
// Off-diagonal entries are computed once and mirrored; the diagonal is set
// to sigma_f2 + sigma_n2 directly.
Eigen::MatrixXd kernel_matrix_from_distances(const Eigen::MatrixXd& D, const Hyperparams& hp);
void kernel_matrix_from_distances_into(const Eigen::MatrixXd& D, const Hyperparams& hp,
                                       Eigen::MatrixXd& K);

// Production kernel matrix (parallel distance pass).
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const Hyperparams& hp);

// Entry-by-entry double loop over kernel(); kept as the testing reference.
Eigen::MatrixXd kernel_matrix_serial(const Eigen::MatrixXd& X, const Hyperparams& hp);

// Cross-covariances between training rows and one probe point. No noise
// term: prediction points are never the same sample as a training row.
Eigen::VectorXd cross_kernel(const Eigen::MatrixXd& X, const Eigen::VectorXd& xstar,
                             const Hyperparams& hp);

} // namespace encergy
