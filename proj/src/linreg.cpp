#include "encergy/linreg.hpp"

#include <cmath>

#include "encergy/error.hpp"
#include "encergy/linalg.hpp"

namespace encergy {

LrModel fit_ols_matrix(const Eigen::MatrixXd& raw_features, const Eigen::VectorXd& y) {
    const Eigen::Index n = raw_features.rows();
    if (n < raw_features.cols())
        fail("TooFewSamples", "OLS fit needs at least " + std::to_string(raw_features.cols()) +
                                  " samples, got " + std::to_string(n));
    if (raw_features.rows() != y.size()) fail("LengthMismatch", "rows of X must match y");
    if (!raw_features.allFinite() || !y.allFinite())
        fail("NonFiniteInput", "design must be finite");

    LrModel model;
    model.stats = compute_standardization(raw_features);
    const Eigen::MatrixXd X = standardize(model.stats, raw_features);
    model.weights = min_norm_lstsq(X, y);
    return model;
}

LrModel fit_ols(const Dataset& dataset) {
    check_dataset(dataset);
    return fit_ols_matrix(feature_matrix(dataset), energy_vector(dataset));
}

double predict_lr_features(const LrModel& model, const FeatureVector& raw) {
    Eigen::VectorXd x(kFeatureDim);
    for (int j = 0; j < kFeatureDim; ++j) {
        if (!std::isfinite(raw[static_cast<std::size_t>(j)]))
            fail("NonFiniteInput", "feature vector must be finite");
        x(j) = raw[static_cast<std::size_t>(j)];
    }
    return standardize(model.stats, x).dot(model.weights);
}

double predict_lr(const LrModel& model, const EncodingConfig& config) {
    validate_config(config);
    return predict_lr_features(model, extract_features(config));
}

} // namespace encergy
