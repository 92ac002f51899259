#include "encergy/kernels.hpp"

#include <cmath>

#include "encergy/error.hpp"
#include "encergy/format.hpp"

namespace encergy {

void validate_hyperparams(const Hyperparams& hp) {
    if (!std::isfinite(hp.sigma_f2) || !std::isfinite(hp.length_scale) ||
        !std::isfinite(hp.sigma_n2))
        fail("NonFiniteInput", "hyperparameters must be finite");
    if (!(hp.sigma_f2 > 0.0)) fail("NonFiniteInput", "sigma_f2 must be > 0");
    if (!(hp.length_scale > 0.0)) fail("NonFiniteInput", "length_scale must be > 0");
    if (hp.sigma_n2 < 0.0) fail("NonFiniteInput", "sigma_n2 must be >= 0");
}

double kernel(const Eigen::VectorXd& xp, const Eigen::VectorXd& xq, const Hyperparams& hp,
              bool same_sample) {
    validate_hyperparams(hp);
    if (xp.size() != xq.size())
        fail("LengthMismatch", "kernel inputs have sizes " + std::to_string(xp.size()) +
                                   " and " + std::to_string(xq.size()));
    if (!xp.allFinite() || !xq.allFinite())
        fail("NonFiniteInput", "kernel inputs must be finite");
    const double d = (xp - xq).norm();
    return hp.sigma_f2 * std::exp(-d / hp.length_scale) + (same_sample ? hp.sigma_n2 : 0.0);
}

Eigen::MatrixXd distance_matrix(const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows();
    // Column-per-sample copy keeps the inner difference contiguous.
    const Eigen::MatrixXd Xt = X.transpose();
    Eigen::MatrixXd D(n, n);
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < n; ++i) {
        D(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j)
            D(i, j) = (Xt.col(i) - Xt.col(j)).norm();
    }
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j) D(i, j) = D(j, i);
    return D;
}

Eigen::MatrixXd distance_matrix_serial(const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows();
    const Eigen::MatrixXd Xt = X.transpose();
    Eigen::MatrixXd D(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        D(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j)
            D(i, j) = (Xt.col(i) - Xt.col(j)).norm();
    }
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j) D(i, j) = D(j, i);
    return D;
}

void kernel_matrix_from_distances_into(const Eigen::MatrixXd& D, const Hyperparams& hp,
                                       Eigen::MatrixXd& K) {
    const Eigen::Index n = D.rows();
    K.resize(n, n);
    const double inv_l = 1.0 / hp.length_scale;
    const double sf2 = hp.sigma_f2;
    // Upper triangle once, mirrored: exact symmetry by construction.
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = sf2 + hp.sigma_n2;
        for (Eigen::Index j = i + 1; j < n; ++j)
            K(i, j) = sf2 * std::exp(-D(i, j) * inv_l);
    }
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j) K(i, j) = K(j, i);
}

Eigen::MatrixXd kernel_matrix_from_distances(const Eigen::MatrixXd& D, const Hyperparams& hp) {
    validate_hyperparams(hp);
    Eigen::MatrixXd K;
    kernel_matrix_from_distances_into(D, hp, K);
    return K;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const Hyperparams& hp) {
    validate_hyperparams(hp);
    if (X.rows() < 1) fail("NonFiniteInput", "kernel_matrix needs at least one row");
    if (!X.allFinite()) fail("NonFiniteInput", "kernel_matrix input must be finite");
    return kernel_matrix_from_distances(distance_matrix(X), hp);
}

Eigen::MatrixXd kernel_matrix_serial(const Eigen::MatrixXd& X, const Hyperparams& hp) {
    validate_hyperparams(hp);
    if (X.rows() < 1) fail("NonFiniteInput", "kernel_matrix needs at least one row");
    if (!X.allFinite()) fail("NonFiniteInput", "kernel_matrix input must be finite");
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            K(i, j) = kernel(X.row(i), X.row(j), hp, i == j);
    return K;
}

Eigen::VectorXd cross_kernel(const Eigen::MatrixXd& X, const Eigen::VectorXd& xstar,
                             const Hyperparams& hp) {
    validate_hyperparams(hp);
    if (X.cols() != xstar.size())
        fail("LengthMismatch", "cross_kernel probe dimension mismatch");
    if (!xstar.allFinite()) fail("NonFiniteInput", "cross_kernel probe must be finite");
    const Eigen::Index n = X.rows();
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = (X.row(i).transpose() - xstar).norm();
        k(i) = hp.sigma_f2 * std::exp(-d / hp.length_scale);
    }
    return k;
}

} // namespace encergy
