#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "encergy/features.hpp"
#include "encergy/gpr.hpp"

namespace encergy {

// Mean absolute percentage error, in percent. All true values must be > 0.
double mape(std::span<const double> true_values, std::span<const double> est_values);

struct FoldAssignment {
    int k = 0;
    std::vector<int> fold_of; // fold index in [0, k) per sample
};

// Seeded shuffle then round-robin; fold sizes differ by at most one.
FoldAssignment kfold_indices(int n, int k, std::uint64_t seed);

enum class ModelKind { Gpr, Lr };
std::string_view model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view s);

struct CvRecord {
    std::string sample_id;
    double e_true;
    double e_est;
    int fold;
};

// Held-out predictions for every sample, in canonical sample_id order.
struct CvReport {
    std::vector<CvRecord> per_sample;
    double mape_percent = 0.0;
};

// K-fold cross-validation: per fold, fits on the complement (recomputing
// standardization from the training rows only) and predicts the held-out
// samples. Folds are assigned on the canonical sample_id order, so the
// report is independent of dataset row order. Folds run under OpenMP when
// parallel_folds is set; the serial path is kept for testing.
CvReport cross_validate(const Dataset& dataset, ModelKind kind, int k, std::uint64_t seed,
                        const FitOptions& opts = {}, bool parallel_folds = true);

// Matrix-level path used by the ablation study (features no longer match
// any real config).
CvReport cross_validate_matrix(const Eigen::MatrixXd& raw_features, const Eigen::VectorXd& y,
                               std::vector<std::string> ids, ModelKind kind, int k,
                               std::uint64_t seed, const FitOptions& opts = {},
                               bool parallel_folds = true);

// Feature groups of the ablation study. The bias column is always constant
// and is not a scenario.
enum class FeatureGroup { Pixels, Preset, Frames, Standard, Qp };
std::string_view feature_group_name(FeatureGroup group);
FeatureGroup parse_feature_group(std::string_view s);
std::vector<int> feature_group_columns(FeatureGroup group);

// Cross-validated MAPE of the GP model after forcing the group's columns to
// a constant (all-ones for boolean groups, 1 for scalar features).
double ablate(const Dataset& dataset, FeatureGroup group, int k, std::uint64_t seed,
              const FitOptions& opts = {}, bool parallel_folds = true);

struct AblationRow {
    std::string scenario; // "a".."e"
    FeatureGroup group;
    double mape_percent;
};

struct AblationReport {
    std::vector<AblationRow> rows;
};

// All five scenarios: a=pixels, b=preset, c=frames, d=standard, e=qp.
AblationReport run_ablation(const Dataset& dataset, int k, std::uint64_t seed,
                            const FitOptions& opts = {}, bool parallel_folds = true);

struct ModelComparison {
    double gpr_mape;
    double lr_mape;
};

// Both model kinds on identical folds (same seed).
ModelComparison compare_models(const Dataset& dataset, int k, std::uint64_t seed,
                               const FitOptions& opts = {}, bool parallel_folds = true);

enum class Grouping { Standard, Resolution, Preset, Qp };
Grouping parse_grouping(std::string_view s);
std::string_view grouping_name(Grouping grouping);

// Plot-facing label. Resolution labels use the vertical resolution, except
// portrait sequences which use the horizontal one; AV1 QP labels are
// divided by 4.
std::string group_label(const EncodingConfig& config, Grouping grouping);

// CSV of (sample_id, group_label, e_true, e_est) for external plotting.
void export_scatter(const CvReport& report, const Dataset& dataset, Grouping grouping,
                    const std::filesystem::path& path);

// Report serialization: CSV `sample_id,fold,e_true,e_est` plus JSON.
void save_report_csv(const CvReport& report, const std::filesystem::path& path);
CvReport load_report_csv(const std::filesystem::path& path);
void save_report_json(const CvReport& report, const std::filesystem::path& path);
void save_ablation_csv(const AblationReport& report, const std::filesystem::path& path);
void save_ablation_json(const AblationReport& report, const std::filesystem::path& path);

} // namespace encergy
