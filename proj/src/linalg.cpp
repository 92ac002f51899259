#include "encergy/linalg.hpp"

#include <Eigen/SVD>

#include "encergy/error.hpp"

namespace encergy {

Eigen::VectorXd min_norm_lstsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                               double rel_tol) {
    if (A.rows() != b.size()) fail("LengthMismatch", "least-squares shape mismatch");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || !(sv(0) > 0.0))
        fail("RankDeficientBasis", "design matrix is numerically zero");
    const double threshold = rel_tol * sv(0);

    const Eigen::VectorXd utb = svd.matrixU().transpose() * b;
    Eigen::VectorXd scaled = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > threshold) scaled(i) = utb(i) / sv(i); // surplus directions stay zero
    return svd.matrixV() * scaled;
}

Eigen::MatrixXd feature_matrix(const Dataset& dataset) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(dataset.size()), kFeatureDim);
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (int j = 0; j < kFeatureDim; ++j)
            X(i, j) = dataset.samples[static_cast<std::size_t>(i)].features[static_cast<std::size_t>(j)];
    return X;
}

Eigen::VectorXd energy_vector(const Dataset& dataset) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(dataset.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i)
        y(i) = dataset.samples[static_cast<std::size_t>(i)].energy_j;
    return y;
}

std::vector<std::string> sample_ids(const Dataset& dataset) {
    std::vector<std::string> ids;
    ids.reserve(dataset.size());
    for (const Sample& s : dataset.samples) ids.push_back(sample_id(s.config));
    return ids;
}

} // namespace encergy
