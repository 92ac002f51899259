#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "encergy/features.hpp"
#include "encergy/kernels.hpp"
#include "encergy/standardize.hpp"

namespace encergy {

struct FitOptions {
    int restarts = 5;
    int max_iterations = 200;      // optimizer iterations per restart
    std::uint64_t seed = 42;
    double convergence_tol = 1e-6; // relative log-likelihood improvement
    // Pin the noise variance instead of optimizing it (bypasses the noise
    // floor; used for interpolation studies and tests).
    std::optional<double> fixed_sigma_n2;
};

void validate_fit_options(const FitOptions& opts);

// Pieces of a GP conditioned on a fixed design: basis weights, lower
// Cholesky factor of K, and dual weights K^{-1}(y - H beta).
struct GpFactors {
    Eigen::VectorXd beta;
    Eigen::MatrixXd chol;
    Eigen::VectorXd dual;
};

// Linear basis h(x) = x; the bias feature supplies the intercept, so the
// mean function is a full affine model of the (standardized) features.
Eigen::VectorXd basis(const Eigen::VectorXd& x);

// Basis applied rowwise to a design matrix.
Eigen::MatrixXd basis_matrix(const Eigen::MatrixXd& X);

// Log marginal likelihood with the basis weights profiled out by
// generalized least squares. X rows are feature vectors in whatever scaling
// the caller chose; everything is computed through the Cholesky factor.
double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const Hyperparams& hp);

// Condition on (X, y) at fixed hyperparameters. No standardization inside.
GpFactors condition_gp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Hyperparams& hp);

// Predictive mean h(x*)^T beta + k*^T dual for a conditioned GP.
double gp_mean(const Eigen::MatrixXd& X, const GpFactors& factors, const Hyperparams& hp,
               const Eigen::VectorXd& xstar);

// Trained predictor. Immutable after fit; safe for concurrent predict calls.
struct GprModel {
    StandardizationStats stats;
    Eigen::MatrixXd X; // standardized training features, n x 9
    Eigen::VectorXd y; // energies in joules
    Hyperparams hp;
    Eigen::VectorXd beta;
    Eigen::MatrixXd chol;
    Eigen::VectorXd dual;
};

// Standardizes features, maximizes the log marginal likelihood over
// (log sigma_f2, log l, log sigma_n2) with multi-start Nelder-Mead, and
// conditions the GP at the winner. Deterministic for fixed inputs.
GprModel fit(const Dataset& dataset, const FitOptions& opts = {});

// Same, on a raw feature matrix (the ablation path).
GprModel fit_matrix(const Eigen::MatrixXd& raw_features, const Eigen::VectorXd& y,
                    const FitOptions& opts = {});

// Standardize + condition at caller-chosen hyperparameters, no optimization.
GprModel fit_with_hyperparams(const Eigen::MatrixXd& raw_features, const Eigen::VectorXd& y,
                              const Hyperparams& hp);

double predict(const GprModel& model, const EncodingConfig& config);
double predict_features(const GprModel& model, const FeatureVector& raw);

// Recheck the factorization and dual-weight invariants; throws on violation.
void verify_model(const GprModel& model);

} // namespace encergy
