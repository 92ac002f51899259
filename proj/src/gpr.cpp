#include "encergy/gpr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Cholesky>

#include "encergy/error.hpp"
#include "encergy/format.hpp"
#include "encergy/linalg.hpp"
#include "encergy/rng.hpp"
#include "encergy/stats.hpp"

namespace encergy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGlsRankTol = 1e-10;
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

struct LmlTerms {
    double lml;
    Eigen::VectorXd beta;
    Eigen::LLT<Eigen::MatrixXd> llt;
};

// Factored likelihood: Cholesky of K, whitened GLS for beta, quadratic form
// and log-determinant through the factor. Returns nothing when K is not
// numerically positive definite.
std::optional<LmlTerms> lml_terms(const Eigen::MatrixXd& K, const Eigen::MatrixXd& H,
                                  const Eigen::VectorXd& y) {
    LmlTerms t;
    t.llt.compute(K);
    if (t.llt.info() != Eigen::Success) return std::nullopt;
    const auto L = t.llt.matrixL();
    const Eigen::MatrixXd A = L.solve(H);
    const Eigen::VectorXd b = L.solve(y);
    t.beta = min_norm_lstsq(A, b, kGlsRankTol);
    const Eigen::VectorXd r = b - A * t.beta;
    const double quad = r.squaredNorm();
    const double logdet = 2.0 * t.llt.matrixLLT().diagonal().array().log().sum();
    const double n = static_cast<double>(y.size());
    t.lml = -0.5 * quad - 0.5 * logdet - 0.5 * n * kLog2Pi;
    return t;
}

void check_design(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() != y.size()) fail("LengthMismatch", "rows of X must match length of y");
    if (X.rows() < 1) fail("TooFewSamples", "need at least one sample");
    if (!X.allFinite() || !y.allFinite()) fail("NonFiniteInput", "design must be finite");
}

struct NmResult {
    Eigen::VectorXd x;
    double f = kInf;
};

// Derivative-free simplex descent. Deterministic: evaluation order and the
// stable ordering of vertices never depend on timing.
template <typename F>
NmResult nelder_mead(F&& func, const Eigen::VectorXd& x0, double step, int max_iter,
                     double ftol) {
    const Eigen::Index dim = x0.size();
    const int m = static_cast<int>(dim) + 1;
    std::vector<Eigen::VectorXd> xs(static_cast<std::size_t>(m));
    std::vector<double> fs(static_cast<std::size_t>(m));
    std::vector<int> order(static_cast<std::size_t>(m));

    auto safe_eval = [&](const Eigen::VectorXd& x) {
        const double f = func(x);
        return std::isnan(f) ? kInf : f;
    };

    xs[0] = x0;
    fs[0] = safe_eval(x0);
    for (int i = 1; i < m; ++i) {
        xs[static_cast<std::size_t>(i)] = x0;
        xs[static_cast<std::size_t>(i)](i - 1) += step;
        fs[static_cast<std::size_t>(i)] = safe_eval(xs[static_cast<std::size_t>(i)]);
    }

    for (int it = 0; it < max_iter; ++it) {
        for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return fs[static_cast<std::size_t>(a)] < fs[static_cast<std::size_t>(b)]; });
        const int best = order.front();
        const int worst = order.back();
        const int second_worst = order[static_cast<std::size_t>(m - 2)];

        const double fb = fs[static_cast<std::size_t>(best)];
        const double fw = fs[static_cast<std::size_t>(worst)];
        // Possible remaining improvement is bounded by the simplex spread.
        if (std::isfinite(fb) && (fw - fb) <= ftol * (std::fabs(fb) + ftol)) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (int i = 0; i < m; ++i)
            if (i != worst) centroid += xs[static_cast<std::size_t>(i)];
        centroid /= static_cast<double>(m - 1);

        const Eigen::VectorXd& xw = xs[static_cast<std::size_t>(worst)];
        const Eigen::VectorXd xr = centroid + (centroid - xw);
        const double fr = safe_eval(xr);

        if (fr < fb) {
            const Eigen::VectorXd xe = centroid + 2.0 * (xr - centroid);
            const double fe = safe_eval(xe);
            if (fe < fr) {
                xs[static_cast<std::size_t>(worst)] = xe;
                fs[static_cast<std::size_t>(worst)] = fe;
            } else {
                xs[static_cast<std::size_t>(worst)] = xr;
                fs[static_cast<std::size_t>(worst)] = fr;
            }
        } else if (fr < fs[static_cast<std::size_t>(second_worst)]) {
            xs[static_cast<std::size_t>(worst)] = xr;
            fs[static_cast<std::size_t>(worst)] = fr;
        } else {
            const bool outside = fr < fw;
            const Eigen::VectorXd xc =
                outside ? centroid + 0.5 * (xr - centroid) : centroid + 0.5 * (xw - centroid);
            const double fc = safe_eval(xc);
            if (fc < std::min(fr, fw)) {
                xs[static_cast<std::size_t>(worst)] = xc;
                fs[static_cast<std::size_t>(worst)] = fc;
            } else {
                // Shrink toward the best vertex.
                const Eigen::VectorXd xb = xs[static_cast<std::size_t>(best)];
                for (int i = 0; i < m; ++i) {
                    if (i == best) continue;
                    xs[static_cast<std::size_t>(i)] = xb + 0.5 * (xs[static_cast<std::size_t>(i)] - xb);
                    fs[static_cast<std::size_t>(i)] = safe_eval(xs[static_cast<std::size_t>(i)]);
                }
            }
        }
    }

    NmResult result;
    int best = 0;
    for (int i = 1; i < m; ++i)
        if (fs[static_cast<std::size_t>(i)] < fs[static_cast<std::size_t>(best)]) best = i;
    result.x = xs[static_cast<std::size_t>(best)];
    result.f = fs[static_cast<std::size_t>(best)];
    return result;
}

} // namespace

void validate_fit_options(const FitOptions& opts) {
    if (opts.restarts < 1) fail("InvalidOptions", "restarts must be >= 1");
    if (opts.max_iterations < 1) fail("InvalidOptions", "max_iterations must be >= 1");
    if (!(opts.convergence_tol > 0.0)) fail("InvalidOptions", "convergence_tol must be > 0");
    if (opts.fixed_sigma_n2 && !(*opts.fixed_sigma_n2 >= 0.0))
        fail("InvalidOptions", "fixed_sigma_n2 must be >= 0");
}

Eigen::VectorXd basis(const Eigen::VectorXd& x) { return x; }

Eigen::MatrixXd basis_matrix(const Eigen::MatrixXd& X) { return X; }

double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const Hyperparams& hp) {
    check_design(X, y);
    validate_hyperparams(hp);
    const Eigen::MatrixXd K = kernel_matrix(X, hp);
    auto terms = lml_terms(K, basis_matrix(X), y);
    if (!terms)
        fail("NotPositiveDefinite",
             "kernel matrix is not positive definite (sigma_n2=" + format_full(hp.sigma_n2) + ")");
    return terms->lml;
}

GpFactors condition_gp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Hyperparams& hp) {
    check_design(X, y);
    validate_hyperparams(hp);
    const Eigen::MatrixXd K = kernel_matrix(X, hp);
    const Eigen::MatrixXd H = basis_matrix(X);
    auto terms = lml_terms(K, H, y);
    if (!terms)
        fail("NotPositiveDefinite",
             "kernel matrix is not positive definite (sigma_n2=" + format_full(hp.sigma_n2) + ")");
    GpFactors factors;
    factors.beta = terms->beta;
    factors.chol = terms->llt.matrixL();
    factors.dual = terms->llt.solve(y - H * terms->beta);
    return factors;
}

double gp_mean(const Eigen::MatrixXd& X, const GpFactors& factors, const Hyperparams& hp,
               const Eigen::VectorXd& xstar) {
    const Eigen::VectorXd k = cross_kernel(X, xstar, hp);
    return basis(xstar).dot(factors.beta) + k.dot(factors.dual);
}

GprModel fit_with_hyperparams(const Eigen::MatrixXd& raw_features, const Eigen::VectorXd& y,
                              const Hyperparams& hp) {
    check_design(raw_features, y);
    GprModel model;
    model.stats = compute_standardization(raw_features);
    model.X = standardize(model.stats, raw_features);
    model.y = y;
    model.hp = hp;
    GpFactors factors = condition_gp(model.X, model.y, hp);
    model.beta = std::move(factors.beta);
    model.chol = std::move(factors.chol);
    model.dual = std::move(factors.dual);
    return model;
}

GprModel fit_matrix(const Eigen::MatrixXd& raw_features, const Eigen::VectorXd& y,
                    const FitOptions& opts) {
    validate_fit_options(opts);
    const Eigen::Index n = raw_features.rows();
    if (n < kFeatureDim + 1)
        fail("TooFewSamples", "GPR fit needs at least " + std::to_string(kFeatureDim + 1) +
                                  " samples, got " + std::to_string(n));
    check_design(raw_features, y);

    const StandardizationStats stats = compute_standardization(raw_features);
    const Eigen::MatrixXd Xs = standardize(stats, raw_features);
    const Eigen::MatrixXd H = basis_matrix(Xs);
    const Eigen::MatrixXd D = distance_matrix(Xs);

    const std::span<const double> yspan(y.data(), static_cast<std::size_t>(y.size()));
    // An overflowing variance poisons every start and surfaces as
    // OptimizationDiverged below.
    double vref = sample_variance(yspan);
    if (!(vref > 0.0)) vref = std::max(1e-12, 1e-12 * mean(yspan) * mean(yspan));
    const double noise_floor = 1e-10 * vref;

    std::vector<double> offdiag;
    offdiag.reserve(static_cast<std::size_t>(n) * (static_cast<std::size_t>(n) - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) offdiag.push_back(D(i, j));
    double med = median(std::move(offdiag));
    if (!(med > 0.0)) med = 1.0;

    const bool pin_noise = opts.fixed_sigma_n2.has_value();
    const int dim = pin_noise ? 2 : 3;
    Eigen::VectorXd theta0(dim);
    theta0(0) = std::log(vref);
    theta0(1) = std::log(med);
    if (!pin_noise) theta0(2) = std::log(0.05 * vref);

    auto to_hyperparams = [&](const Eigen::VectorXd& theta) {
        Hyperparams hp;
        hp.sigma_f2 = std::exp(theta(0));
        hp.length_scale = std::exp(theta(1));
        hp.sigma_n2 = pin_noise ? *opts.fixed_sigma_n2 : std::max(std::exp(theta(2)), noise_floor);
        return hp;
    };

    struct RestartOutcome {
        double nll = kInf;
        double length_scale = kInf;
        Eigen::VectorXd theta;
        std::exception_ptr error;
    };
    std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(opts.restarts));

#pragma omp parallel for schedule(dynamic, 1) if (opts.restarts > 1)
    for (int r = 0; r < opts.restarts; ++r) {
        auto& out = outcomes[static_cast<std::size_t>(r)];
        try {
            Eigen::VectorXd start = theta0;
            if (r > 0) {
                // Seeded log-uniform perturbations around the heuristic start.
                Rng rng(mix_seed({opts.seed, static_cast<std::uint64_t>(r)}));
                for (int i = 0; i < dim; ++i) start(i) += rng.uniform(-3.0, 3.0);
            }

            Eigen::MatrixXd K;
            Eigen::LLT<Eigen::MatrixXd> llt;
            auto objective = [&](const Eigen::VectorXd& theta) {
                const Hyperparams hp = to_hyperparams(theta);
                if (!std::isfinite(hp.sigma_f2) || !std::isfinite(hp.length_scale) ||
                    !std::isfinite(hp.sigma_n2) || !(hp.sigma_f2 > 0.0) ||
                    !(hp.length_scale > 0.0))
                    return kInf;
                kernel_matrix_from_distances_into(D, hp, K);
                llt.compute(K);
                if (llt.info() != Eigen::Success) return kInf;
                const auto L = llt.matrixL();
                const Eigen::MatrixXd A = L.solve(H);
                const Eigen::VectorXd b = L.solve(y);
                const Eigen::VectorXd beta = min_norm_lstsq(A, b, kGlsRankTol);
                const double quad = (b - A * beta).squaredNorm();
                const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
                return 0.5 * quad + 0.5 * logdet + 0.5 * static_cast<double>(n) * kLog2Pi;
            };

            const NmResult nm =
                nelder_mead(objective, start, 0.5, opts.max_iterations, opts.convergence_tol);
            out.nll = nm.f;
            out.theta = nm.x;
            if (nm.x.size() == dim) out.length_scale = std::exp(nm.x(1));
        } catch (...) {
            out.error = std::current_exception();
        }
    }
    for (const auto& out : outcomes)
        if (out.error) std::rethrow_exception(out.error);

    // Deterministic merge: best likelihood, ties broken by smaller length scale.
    int best = 0;
    for (int r = 1; r < opts.restarts; ++r) {
        const auto& a = outcomes[static_cast<std::size_t>(r)];
        const auto& b = outcomes[static_cast<std::size_t>(best)];
        if (a.nll < b.nll || (a.nll == b.nll && a.length_scale < b.length_scale)) best = r;
    }
    if (!std::isfinite(outcomes[static_cast<std::size_t>(best)].nll))
        fail("OptimizationDiverged", "no restart reached a finite log marginal likelihood");

    const Hyperparams hp = to_hyperparams(outcomes[static_cast<std::size_t>(best)].theta);

    GprModel model;
    model.stats = stats;
    model.X = Xs;
    model.y = y;
    model.hp = hp;
    GpFactors factors = condition_gp(Xs, y, hp);
    model.beta = std::move(factors.beta);
    model.chol = std::move(factors.chol);
    model.dual = std::move(factors.dual);
    return model;
}

GprModel fit(const Dataset& dataset, const FitOptions& opts) {
    check_dataset(dataset);
    return fit_matrix(feature_matrix(dataset), energy_vector(dataset), opts);
}

double predict_features(const GprModel& model, const FeatureVector& raw) {
    Eigen::VectorXd x(kFeatureDim);
    for (int j = 0; j < kFeatureDim; ++j) {
        if (!std::isfinite(raw[static_cast<std::size_t>(j)]))
            fail("NonFiniteInput", "feature vector must be finite");
        x(j) = raw[static_cast<std::size_t>(j)];
    }
    const Eigen::VectorXd xstar = standardize(model.stats, x);
    const Eigen::VectorXd k = cross_kernel(model.X, xstar, model.hp);
    const double value = basis(xstar).dot(model.beta) + k.dot(model.dual);
    if (!std::isfinite(value)) fail("NonFiniteInput", "prediction is not finite");
    return value;
}

double predict(const GprModel& model, const EncodingConfig& config) {
    validate_config(config);
    return predict_features(model, extract_features(config));
}

void verify_model(const GprModel& model) {
    validate_hyperparams(model.hp);
    const Eigen::Index n = model.X.rows();
    if (model.y.size() != n || model.chol.rows() != n || model.chol.cols() != n ||
        model.dual.size() != n || model.beta.size() != model.X.cols())
        fail("InvariantViolation", "model dimensions are inconsistent");

    const Eigen::MatrixXd K = kernel_matrix(model.X, model.hp);
    const double chol_err =
        (model.chol * model.chol.transpose() - K).norm() / std::max(K.norm(), 1e-300);
    if (!(chol_err <= 1e-10))
        fail("InvariantViolation",
             "Cholesky factor does not reproduce the kernel matrix (relative error " +
                 format_full(chol_err) + ")");

    const Eigen::VectorXd r = model.y - basis_matrix(model.X) * model.beta;
    const double denom = std::max(r.norm(), 1e-12 * std::max(model.y.norm(), 1.0));
    const double dual_err = (K * model.dual - r).norm() / denom;
    if (!(dual_err <= 1e-8))
        fail("InvariantViolation", "dual weights do not solve K dual = y - H beta (relative error " +
                                       format_full(dual_err) + ")");
}

} // namespace encergy
