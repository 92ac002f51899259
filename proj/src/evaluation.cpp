#include "encergy/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "encergy/error.hpp"
#include "encergy/format.hpp"
#include "encergy/linalg.hpp"
#include "encergy/linreg.hpp"
#include "encergy/rng.hpp"

namespace encergy {

double mape(std::span<const double> true_values, std::span<const double> est_values) {
    if (true_values.size() != est_values.size())
        fail("LengthMismatch", "mape needs equally long sequences, got " +
                                   std::to_string(true_values.size()) + " and " +
                                   std::to_string(est_values.size()));
    if (true_values.empty()) fail("LengthMismatch", "mape of empty sequences");
    double sum = 0.0;
    for (std::size_t i = 0; i < true_values.size(); ++i) {
        if (!(true_values[i] > 0.0))
            fail("NonPositiveTrueValue", "true value at index " + std::to_string(i) +
                                             " is " + format_full(true_values[i]));
        sum += std::fabs(true_values[i] - est_values[i]) / true_values[i];
    }
    return sum / static_cast<double>(true_values.size()) * 100.0;
}

FoldAssignment kfold_indices(int n, int k, std::uint64_t seed) {
    if (k < 2 || k > n) fail("InvalidK", "need 2 <= k <= n, got k=" + std::to_string(k) +
                                             ", n=" + std::to_string(n));
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    // Fisher-Yates with our own generator: assignment depends only on (n, k, seed).
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    FoldAssignment folds;
    folds.k = k;
    folds.fold_of.assign(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) folds.fold_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i % k;
    return folds;
}

std::string_view model_kind_name(ModelKind kind) {
    return kind == ModelKind::Gpr ? "gpr" : "lr";
}

ModelKind parse_model_kind(std::string_view s) {
    if (s == "gpr") return ModelKind::Gpr;
    if (s == "lr") return ModelKind::Lr;
    fail("ParseError", "unknown model kind '" + std::string(s) + "' (expected gpr|lr)");
}

CvReport cross_validate_matrix(const Eigen::MatrixXd& raw_features, const Eigen::VectorXd& y,
                               std::vector<std::string> ids, ModelKind kind, int k,
                               std::uint64_t seed, const FitOptions& opts,
                               bool parallel_folds) {
    const Eigen::Index n = raw_features.rows();
    if (static_cast<Eigen::Index>(ids.size()) != n || y.size() != n)
        fail("LengthMismatch", "features, targets and ids must have equal length");

    // Canonical order: sort by sample id so the report does not depend on
    // the row order of the input.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return ids[static_cast<std::size_t>(a)] < ids[static_cast<std::size_t>(b)]; });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (ids[static_cast<std::size_t>(order[i - 1])] == ids[static_cast<std::size_t>(order[i])])
            fail("InvariantViolation", "duplicate sample_id " + ids[static_cast<std::size_t>(order[i])]);

    const FoldAssignment folds = kfold_indices(static_cast<int>(n), k, seed);

    CvReport report;
    report.per_sample.resize(static_cast<std::size_t>(n));

    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(k));

#pragma omp parallel for schedule(dynamic, 1) if (parallel_folds)
    for (int fold = 0; fold < k; ++fold) {
        try {
            std::vector<int> train_rows, test_rows;
            train_rows.reserve(static_cast<std::size_t>(n));
            for (int pos = 0; pos < static_cast<int>(n); ++pos) {
                (folds.fold_of[static_cast<std::size_t>(pos)] == fold ? test_rows : train_rows)
                    .push_back(order[static_cast<std::size_t>(pos)]);
            }

            Eigen::MatrixXd Xtrain(static_cast<Eigen::Index>(train_rows.size()), raw_features.cols());
            Eigen::VectorXd ytrain(static_cast<Eigen::Index>(train_rows.size()));
            for (std::size_t i = 0; i < train_rows.size(); ++i) {
                Xtrain.row(static_cast<Eigen::Index>(i)) = raw_features.row(train_rows[i]);
                ytrain(static_cast<Eigen::Index>(i)) = y(train_rows[i]);
            }

            // Standardization statistics come from the training rows only.
            auto predict_row = [&](auto&& model, int row) {
                FeatureVector raw{};
                for (int j = 0; j < kFeatureDim; ++j)
                    raw[static_cast<std::size_t>(j)] = raw_features(row, j);
                if constexpr (std::is_same_v<std::decay_t<decltype(model)>, GprModel>)
                    return predict_features(model, raw);
                else
                    return predict_lr_features(model, raw);
            };

            auto emit = [&](auto&& model) {
                for (int pos = 0; pos < static_cast<int>(n); ++pos) {
                    if (folds.fold_of[static_cast<std::size_t>(pos)] != fold) continue;
                    const int row = order[static_cast<std::size_t>(pos)];
                    auto& rec = report.per_sample[static_cast<std::size_t>(pos)];
                    rec.sample_id = ids[static_cast<std::size_t>(row)];
                    rec.e_true = y(row);
                    rec.e_est = predict_row(model, row);
                    rec.fold = fold;
                }
            };

            if (kind == ModelKind::Gpr)
                emit(fit_matrix(Xtrain, ytrain, opts));
            else
                emit(fit_ols_matrix(Xtrain, ytrain));
        } catch (const Error& e) {
            errors[static_cast<std::size_t>(fold)] = std::make_exception_ptr(
                Error(e.kind(), "fold " + std::to_string(fold) + ": " + e.what()));
        } catch (...) {
            errors[static_cast<std::size_t>(fold)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<double> e_true, e_est;
    e_true.reserve(static_cast<std::size_t>(n));
    e_est.reserve(static_cast<std::size_t>(n));
    for (const CvRecord& rec : report.per_sample) {
        e_true.push_back(rec.e_true);
        e_est.push_back(rec.e_est);
    }
    report.mape_percent = mape(e_true, e_est);
    return report;
}

CvReport cross_validate(const Dataset& dataset, ModelKind kind, int k, std::uint64_t seed,
                        const FitOptions& opts, bool parallel_folds) {
    check_dataset(dataset);
    return cross_validate_matrix(feature_matrix(dataset), energy_vector(dataset),
                                 sample_ids(dataset), kind, k, seed, opts, parallel_folds);
}

std::string_view feature_group_name(FeatureGroup group) {
    switch (group) {
        case FeatureGroup::Pixels: return "pixels";
        case FeatureGroup::Preset: return "preset";
        case FeatureGroup::Frames: return "frames";
        case FeatureGroup::Standard: return "standard";
        case FeatureGroup::Qp: return "qp";
    }
    fail("ParseError", "unknown feature group tag");
}

FeatureGroup parse_feature_group(std::string_view s) {
    if (s == "pixels") return FeatureGroup::Pixels;
    if (s == "preset") return FeatureGroup::Preset;
    if (s == "frames") return FeatureGroup::Frames;
    if (s == "standard") return FeatureGroup::Standard;
    if (s == "qp") return FeatureGroup::Qp;
    fail("ParseError", "unknown feature group '" + std::string(s) +
                           "' (expected pixels|preset|frames|standard|qp)");
}

std::vector<int> feature_group_columns(FeatureGroup group) {
    switch (group) {
        case FeatureGroup::Pixels: return {feature::kPixels};
        case FeatureGroup::Preset: return {feature::kUltrafast, feature::kSlow};
        case FeatureGroup::Frames: return {feature::kFrames};
        case FeatureGroup::Standard: return {feature::kH264, feature::kH265, feature::kAv1};
        case FeatureGroup::Qp: return {feature::kQp};
    }
    fail("ParseError", "unknown feature group tag");
}

double ablate(const Dataset& dataset, FeatureGroup group, int k, std::uint64_t seed,
              const FitOptions& opts, bool parallel_folds) {
    check_dataset(dataset);
    Eigen::MatrixXd X = feature_matrix(dataset);
    // Removing a feature means pinning its columns: all-ones for boolean
    // groups, 1 for scalar features.
    for (int col : feature_group_columns(group)) X.col(col).setOnes();
    return cross_validate_matrix(X, energy_vector(dataset), sample_ids(dataset), ModelKind::Gpr,
                                 k, seed, opts, parallel_folds)
        .mape_percent;
}

AblationReport run_ablation(const Dataset& dataset, int k, std::uint64_t seed,
                            const FitOptions& opts, bool parallel_folds) {
    static constexpr FeatureGroup kScenarios[] = {FeatureGroup::Pixels, FeatureGroup::Preset,
                                                  FeatureGroup::Frames, FeatureGroup::Standard,
                                                  FeatureGroup::Qp};
    AblationReport report;
    char label = 'a';
    for (FeatureGroup group : kScenarios) {
        report.rows.push_back(
            {std::string(1, label), group, ablate(dataset, group, k, seed, opts, parallel_folds)});
        ++label;
    }
    return report;
}

ModelComparison compare_models(const Dataset& dataset, int k, std::uint64_t seed,
                               const FitOptions& opts, bool parallel_folds) {
    // Identical folds for both model kinds: same n, k and seed.
    ModelComparison cmp{};
    cmp.gpr_mape = cross_validate(dataset, ModelKind::Gpr, k, seed, opts, parallel_folds).mape_percent;
    cmp.lr_mape = cross_validate(dataset, ModelKind::Lr, k, seed, opts, parallel_folds).mape_percent;
    return cmp;
}

Grouping parse_grouping(std::string_view s) {
    if (s == "standard") return Grouping::Standard;
    if (s == "resolution") return Grouping::Resolution;
    if (s == "preset") return Grouping::Preset;
    if (s == "qp") return Grouping::Qp;
    fail("ParseError", "unknown grouping '" + std::string(s) +
                           "' (expected standard|resolution|preset|qp)");
}

std::string_view grouping_name(Grouping grouping) {
    switch (grouping) {
        case Grouping::Standard: return "standard";
        case Grouping::Resolution: return "resolution";
        case Grouping::Preset: return "preset";
        case Grouping::Qp: return "qp";
    }
    fail("ParseError", "unknown grouping tag");
}

std::string group_label(const EncodingConfig& config, Grouping grouping) {
    switch (grouping) {
        case Grouping::Standard: return std::string(standard_name(config.standard));
        case Grouping::Preset: return std::string(preset_name(config.preset));
        case Grouping::Resolution:
            // Vertical resolution, except portrait sequences which are
            // grouped by their horizontal resolution.
            return std::to_string(config.width < config.height ? config.width : config.height);
        case Grouping::Qp:
            if (config.standard == Standard::AV1)
                return format_sig6(static_cast<double>(config.qp) / 4.0);
            return std::to_string(config.qp);
    }
    fail("ParseError", "unknown grouping tag");
}

void export_scatter(const CvReport& report, const Dataset& dataset, Grouping grouping,
                    const std::filesystem::path& path) {
    std::unordered_map<std::string, const EncodingConfig*> by_id;
    by_id.reserve(dataset.size());
    for (const Sample& s : dataset.samples) by_id.emplace(sample_id(s.config), &s.config);

    std::ofstream out(path);
    if (!out) fail("ParseError", "cannot write " + path.string());
    out << "sample_id,group_label,e_true,e_est\n";
    for (const CvRecord& rec : report.per_sample) {
        auto it = by_id.find(rec.sample_id);
        if (it == by_id.end())
            fail("UnknownSampleId", "report references '" + rec.sample_id +
                                        "' which is not in the dataset");
        out << rec.sample_id << ',' << group_label(*it->second, grouping) << ','
            << format_full(rec.e_true) << ',' << format_full(rec.e_est) << '\n';
    }
    if (!out.flush()) fail("ParseError", "failed writing " + path.string());
}

void save_report_csv(const CvReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) fail("ParseError", "cannot write " + path.string());
    out << "sample_id,fold,e_true,e_est\n";
    for (const CvRecord& rec : report.per_sample)
        out << rec.sample_id << ',' << rec.fold << ',' << format_full(rec.e_true) << ','
            << format_full(rec.e_est) << '\n';
    if (!out.flush()) fail("ParseError", "failed writing " + path.string());
}

CvReport load_report_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("ParseError", "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) fail("ParseError", path.string() + ": missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "sample_id,fold,e_true,e_est")
        fail("ParseError", path.string() + ": header must be 'sample_id,fold,e_true,e_est'");

    CvReport report;
    std::vector<double> e_true, e_est;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                fields.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (fields.size() != 4)
            fail("ParseError", path.string() + ": line " + std::to_string(lineno) +
                                   ": expected 4 columns");
        const auto fold = try_parse_int(fields[1]);
        const auto t = try_parse_double(fields[2]);
        const auto e = try_parse_double(fields[3]);
        if (!fold || !t || !e)
            fail("ParseError", path.string() + ": line " + std::to_string(lineno) +
                                   ": invalid number");
        report.per_sample.push_back({fields[0], *t, *e, static_cast<int>(*fold)});
        e_true.push_back(*t);
        e_est.push_back(*e);
    }
    if (!report.per_sample.empty()) report.mape_percent = mape(e_true, e_est);
    return report;
}

void save_report_json(const CvReport& report, const std::filesystem::path& path) {
    nlohmann::json per_sample = nlohmann::json::array();
    for (const CvRecord& rec : report.per_sample)
        per_sample.push_back({{"sample_id", rec.sample_id},
                              {"e_true", rec.e_true},
                              {"e_est", rec.e_est},
                              {"fold", rec.fold}});
    nlohmann::json j{{"mape_percent", report.mape_percent}, {"per_sample", per_sample}};
    std::ofstream out(path);
    if (!out) fail("ParseError", "cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out.flush()) fail("ParseError", "failed writing " + path.string());
}

void save_ablation_csv(const AblationReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) fail("ParseError", "cannot write " + path.string());
    out << "scenario,feature,mape\n";
    for (const AblationRow& row : report.rows)
        out << row.scenario << ',' << feature_group_name(row.group) << ','
            << format_full(row.mape_percent) << '\n';
    if (!out.flush()) fail("ParseError", "failed writing " + path.string());
}

void save_ablation_json(const AblationReport& report, const std::filesystem::path& path) {
    nlohmann::json rows = nlohmann::json::array();
    for (const AblationRow& row : report.rows)
        rows.push_back({{"scenario", row.scenario},
                        {"feature", std::string(feature_group_name(row.group))},
                        {"mape_percent", row.mape_percent}});
    nlohmann::json j{{"rows", rows}};
    std::ofstream out(path);
    if (!out) fail("ParseError", "cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out.flush()) fail("ParseError", "failed writing " + path.string());
}

} // namespace encergy
