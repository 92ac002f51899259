#include "encergy/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "encergy/error.hpp"

namespace encergy {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

json to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::VectorXd vector_from(const json& a, const char* what) {
    if (!a.is_array()) fail("ParseError", std::string(what) + " must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) fail("ParseError", std::string(what) + " must hold numbers");
        v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    }
    return v;
}

Eigen::MatrixXd matrix_from(const json& a, const char* what) {
    if (!a.is_array() || a.empty()) fail("ParseError", std::string(what) + " must be a non-empty array");
    const std::size_t cols = a[0].is_array() ? a[0].size() : 0;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_array() || a[i].size() != cols)
            fail("ParseError", std::string(what) + " must hold equal-length rows");
        for (std::size_t j = 0; j < cols; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i][j].get<double>();
    }
    return m;
}

json stats_to_json(const StandardizationStats& stats) {
    return json{{"mean", to_json(stats.mean)}, {"scale", to_json(stats.scale)}};
}

StandardizationStats stats_from_json(const json& j) {
    StandardizationStats stats;
    stats.mean = vector_from(j.at("mean"), "stats.mean");
    stats.scale = vector_from(j.at("scale"), "stats.scale");
    if (stats.mean.size() != stats.scale.size())
        fail("ParseError", "stats.mean and stats.scale must have equal length");
    for (Eigen::Index i = 0; i < stats.scale.size(); ++i)
        if (!(stats.scale(i) > 0.0)) fail("InvariantViolation", "stats.scale must be positive");
    return stats;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("ParseError", "cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail("ParseError", path.string() + ": " + e.what());
    }
    return j;
}

void write_json_file(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) fail("ParseError", "cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out.flush()) fail("ParseError", "failed writing " + path.string());
}

std::string kind_of(const json& j, const std::filesystem::path& path) {
    if (!j.contains("model_kind") || !j["model_kind"].is_string())
        fail("ParseError", path.string() + ": missing model_kind discriminator");
    return j["model_kind"].get<std::string>();
}

} // namespace

void save_model(const GprModel& model, const std::filesystem::path& path) {
    json j{{"schema_version", kSchemaVersion},
           {"model_kind", "gpr"},
           {"stats", stats_to_json(model.stats)},
           {"hyperparams",
            {{"sigma_f2", model.hp.sigma_f2},
             {"length_scale", model.hp.length_scale},
             {"sigma_n2", model.hp.sigma_n2}}},
           {"beta", to_json(model.beta)},
           {"X", to_json(model.X)},
           {"y", to_json(model.y)},
           {"dual", to_json(model.dual)}};
    write_json_file(j, path);
}

void save_model(const LrModel& model, const std::filesystem::path& path) {
    json j{{"schema_version", kSchemaVersion},
           {"model_kind", "lr"},
           {"stats", stats_to_json(model.stats)},
           {"weights", to_json(model.weights)}};
    write_json_file(j, path);
}

GprModel load_gpr_model(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    try {
        if (kind_of(j, path) != "gpr")
            fail("ParseError", path.string() + ": model_kind is not 'gpr'");
        if (j.at("schema_version").get<int>() != kSchemaVersion)
            fail("ParseError", path.string() + ": unsupported schema_version");

        GprModel model;
        model.stats = stats_from_json(j.at("stats"));
        const json& hp = j.at("hyperparams");
        model.hp.sigma_f2 = hp.at("sigma_f2").get<double>();
        model.hp.length_scale = hp.at("length_scale").get<double>();
        model.hp.sigma_n2 = hp.at("sigma_n2").get<double>();
        model.beta = vector_from(j.at("beta"), "beta");
        model.X = matrix_from(j.at("X"), "X");
        model.y = vector_from(j.at("y"), "y");
        model.dual = vector_from(j.at("dual"), "dual");

        // The factor is never trusted from disk: recompute, then verify the
        // stored pieces against the model invariants.
        validate_hyperparams(model.hp);
        Eigen::LLT<Eigen::MatrixXd> llt(kernel_matrix(model.X, model.hp));
        if (llt.info() != Eigen::Success)
            fail("NotPositiveDefinite", path.string() + ": stored kernel matrix is not positive definite");
        model.chol = llt.matrixL();
        verify_model(model);
        return model;
    } catch (const json::exception& e) {
        fail("ParseError", path.string() + ": " + e.what());
    }
}

LrModel load_lr_model(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    try {
        if (kind_of(j, path) != "lr")
            fail("ParseError", path.string() + ": model_kind is not 'lr'");
        if (j.at("schema_version").get<int>() != kSchemaVersion)
            fail("ParseError", path.string() + ": unsupported schema_version");
        LrModel model;
        model.stats = stats_from_json(j.at("stats"));
        model.weights = vector_from(j.at("weights"), "weights");
        if (!model.weights.allFinite())
            fail("InvariantViolation", path.string() + ": weights must be finite");
        return model;
    } catch (const json::exception& e) {
        fail("ParseError", path.string() + ": " + e.what());
    }
}

std::variant<GprModel, LrModel> load_any_model(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    const std::string kind = kind_of(j, path);
    if (kind == "gpr") return load_gpr_model(path);
    if (kind == "lr") return load_lr_model(path);
    fail("ParseError", path.string() + ": unknown model_kind '" + kind + "'");
}

} // namespace encergy
