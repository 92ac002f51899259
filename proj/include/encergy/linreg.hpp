#pragma once

#include <Eigen/Dense>

#include "encergy/features.hpp"
#include "encergy/standardize.hpp"

namespace encergy {

// Ordinary least squares baseline sharing the standardization pipeline with
// the GP model, so comparisons isolate the model class.
struct LrModel {
    StandardizationStats stats;
    Eigen::VectorXd weights;
};

LrModel fit_ols(const Dataset& dataset);
LrModel fit_ols_matrix(const Eigen::MatrixXd& raw_features, const Eigen::VectorXd& y);

double predict_lr(const LrModel& model, const EncodingConfig& config);
double predict_lr_features(const LrModel& model, const FeatureVector& raw);

} // namespace encergy
