#include "encergy/corpus.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "encergy/error.hpp"
#include "encergy/rng.hpp"

namespace encergy {

namespace {

using nlohmann::json;

double qp_midpoint(Standard s) {
    const QpRange r = qp_range(s);
    return 0.5 * (static_cast<double>(r.lo) + static_cast<double>(r.hi));
}

// Round to nanojoules so dataset CSVs round-trip bit-exactly.
double quantize_energy(double e) { return std::round(e * 1e9) / 1e9; }

std::uint64_t draw_seed(const EncodingConfig& config, const OracleParams& params,
                        int draw_index) {
    std::uint64_t h = hash_str(config.sequence_id);
    h = hash_str("|", h);
    const long long fields[] = {config.width, config.height, config.frames,
                                static_cast<long long>(config.standard),
                                static_cast<long long>(config.preset), config.qp, draw_index};
    h = hash_bytes(fields, sizeof(fields), h);
    return mix_seed({params.seed, h});
}

} // namespace

CorpusSpec default_corpus_spec() {
    CorpusSpec spec;
    spec.resolutions = {{480, 270}, {640, 360}, {1280, 720}, {1920, 1080}, {3840, 2160}};
    spec.standards = {Standard::H264, Standard::H265, Standard::AV1};
    spec.presets = {Preset::Ultrafast, Preset::Slow};
    spec.qp_grid[Standard::H264] = {22, 27, 32, 37};
    spec.qp_grid[Standard::H265] = {22, 27, 32, 37};
    spec.qp_grid[Standard::AV1] = {108, 132, 160, 184};
    return spec;
}

OracleParams default_oracle_params() {
    OracleParams params;
    params.standard_factor = {{Standard::H264, 1.0}, {Standard::H265, 1.1}, {Standard::AV1, 1.25}};
    params.preset_factor = {{Preset::Ultrafast, 1.0}, {Preset::Slow, 1.6}};
    return params;
}

void validate_corpus_spec(const CorpusSpec& spec) {
    if (spec.resolutions.empty() || spec.standards.empty() || spec.presets.empty())
        fail("InvalidOptions", "corpus spec lists must be non-empty");
    if (spec.sequences_per_class < 1)
        fail("InvalidOptions", "sequences_per_class must be >= 1");
    if (spec.frame_min < 1 || spec.frame_max > 10000 || spec.frame_min > spec.frame_max)
        fail("InvalidOptions", "frame range must lie within [1, 10000]");
    for (const Resolution& r : spec.resolutions)
        if (r.width <= 0 || r.height <= 0)
            fail("NonPositiveDimension", "corpus resolutions must be positive");
    for (Standard s : spec.standards) {
        auto it = spec.qp_grid.find(s);
        if (it == spec.qp_grid.end() || it->second.empty())
            fail("InvalidOptions",
                 std::string("missing QP grid for ") + std::string(standard_name(s)));
        const QpRange range = qp_range(s);
        for (int qp : it->second)
            if (qp < range.lo || qp > range.hi)
                fail("QpOutOfRange", std::string(standard_name(s)) + " allows QP " +
                                         std::to_string(range.lo) + "-" + std::to_string(range.hi) +
                                         ", grid has " + std::to_string(qp));
    }
}

void validate_oracle_params(const OracleParams& params) {
    if (!(params.base_j >= 0.0)) fail("InvalidOptions", "base_j must be >= 0");
    if (!(params.per_pixel_frame_j > 0.0)) fail("InvalidOptions", "per_pixel_frame_j must be > 0");
    if (!(params.noise_rel >= 0.0)) fail("InvalidOptions", "noise_rel must be >= 0");
    for (Standard s : {Standard::H264, Standard::H265, Standard::AV1}) {
        auto it = params.standard_factor.find(s);
        if (it == params.standard_factor.end() || !(it->second > 0.0))
            fail("InvalidOptions", "standard_factor must be positive for every standard");
    }
    for (Preset p : {Preset::Ultrafast, Preset::Slow}) {
        auto it = params.preset_factor.find(p);
        if (it == params.preset_factor.end() || !(it->second > 0.0))
            fail("InvalidOptions", "preset_factor must be positive for every preset");
    }
}

double oracle_energy(const EncodingConfig& config, const OracleParams& params, int draw_index) {
    validate_config(config);
    validate_oracle_params(params);
    const double pixels =
        static_cast<double>(config.width) * static_cast<double>(config.height);
    const double qp_term =
        std::max(1.0 + params.qp_slope * (static_cast<double>(config.qp) - qp_midpoint(config.standard)), 0.0);
    const double mean_energy =
        params.base_j + params.per_pixel_frame_j * pixels * static_cast<double>(config.frames) *
                            params.standard_factor.at(config.standard) *
                            params.preset_factor.at(config.preset) * qp_term;
    if (params.noise_rel == 0.0) return mean_energy;
    Rng rng(draw_seed(config, params, draw_index));
    return mean_energy * std::exp(params.noise_rel * rng.normal());
}

Dataset generate_corpus(const CorpusSpec& spec, const OracleParams& params) {
    validate_corpus_spec(spec);
    validate_oracle_params(params);

    Dataset dataset;
    for (std::size_t ri = 0; ri < spec.resolutions.size(); ++ri) {
        const Resolution& res = spec.resolutions[ri];
        for (int si = 0; si < spec.sequences_per_class; ++si) {
            // One frame count per sequence, shared across all of its
            // standard/preset/QP combinations.
            Rng frame_rng(mix_seed({spec.seed, 0x66726d73ull, static_cast<std::uint64_t>(ri),
                                    static_cast<std::uint64_t>(si)}));
            const int frames = frame_rng.uniform_int(spec.frame_min, spec.frame_max);
            std::string sequence_id = "r" + std::to_string(ri) + "_" + std::to_string(res.width) +
                                      "x" + std::to_string(res.height) + "_s" + std::to_string(si);
            for (Standard standard : spec.standards) {
                for (Preset preset : spec.presets) {
                    for (int qp : spec.qp_grid.at(standard)) {
                        EncodingConfig config;
                        config.sequence_id = sequence_id;
                        config.width = res.width;
                        config.height = res.height;
                        config.frames = frames;
                        config.standard = standard;
                        config.preset = preset;
                        config.qp = qp;
                        const double energy = quantize_energy(oracle_energy(config, params, 0));
                        dataset.samples.push_back(make_sample(std::move(config), energy));
                    }
                }
            }
        }
    }
    check_dataset(dataset);
    return dataset;
}

namespace {

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

} // namespace

CorpusSpec load_corpus_spec(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    CorpusSpec spec = default_corpus_spec();
    try {
        if (j.contains("resolutions")) {
            spec.resolutions.clear();
            for (const auto& r : j.at("resolutions"))
                spec.resolutions.push_back({r.at(0).get<int>(), r.at(1).get<int>()});
        }
        if (j.contains("standards")) {
            spec.standards.clear();
            for (const auto& s : j.at("standards"))
                spec.standards.push_back(parse_standard(s.get<std::string>()));
        }
        if (j.contains("presets")) {
            spec.presets.clear();
            for (const auto& p : j.at("presets"))
                spec.presets.push_back(parse_preset(p.get<std::string>()));
        }
        if (j.contains("qp_grid")) {
            spec.qp_grid.clear();
            for (const auto& [key, value] : j.at("qp_grid").items())
                spec.qp_grid[parse_standard(key)] = value.get<std::vector<int>>();
        }
        if (j.contains("sequences_per_class"))
            spec.sequences_per_class = j.at("sequences_per_class").get<int>();
        if (j.contains("frame_range")) {
            spec.frame_min = j.at("frame_range").at(0).get<int>();
            spec.frame_max = j.at("frame_range").at(1).get<int>();
        }
        if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        fail("ParseError", path.string() + ": " + e.what());
    }
    validate_corpus_spec(spec);
    return spec;
}

OracleParams load_oracle_params(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    OracleParams params = default_oracle_params();
    try {
        if (j.contains("base_j")) params.base_j = j.at("base_j").get<double>();
        if (j.contains("per_pixel_frame_j"))
            params.per_pixel_frame_j = j.at("per_pixel_frame_j").get<double>();
        if (j.contains("standard_factor"))
            for (const auto& [key, value] : j.at("standard_factor").items())
                params.standard_factor[parse_standard(key)] = value.get<double>();
        if (j.contains("preset_factor"))
            for (const auto& [key, value] : j.at("preset_factor").items())
                params.preset_factor[parse_preset(key)] = value.get<double>();
        if (j.contains("qp_slope")) params.qp_slope = j.at("qp_slope").get<double>();
        if (j.contains("noise_rel")) params.noise_rel = j.at("noise_rel").get<double>();
        if (j.contains("seed")) params.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        fail("ParseError", path.string() + ": " + e.what());
    }
    validate_oracle_params(params);
    return params;
}

void save_corpus_spec(const CorpusSpec& spec, const std::filesystem::path& path) {
    json resolutions = json::array();
    for (const Resolution& r : spec.resolutions) resolutions.push_back({r.width, r.height});
    json standards = json::array();
    for (Standard s : spec.standards) standards.push_back(std::string(standard_name(s)));
    json presets = json::array();
    for (Preset p : spec.presets) presets.push_back(std::string(preset_name(p)));
    json qp_grid = json::object();
    for (const auto& [standard, grid] : spec.qp_grid)
        qp_grid[std::string(standard_name(standard))] = grid;
    write_json_file(json{{"resolutions", resolutions},
                         {"standards", standards},
                         {"presets", presets},
                         {"qp_grid", qp_grid},
                         {"sequences_per_class", spec.sequences_per_class},
                         {"frame_range", {spec.frame_min, spec.frame_max}},
                         {"seed", spec.seed}},
                    path);
}

void save_oracle_params(const OracleParams& params, const std::filesystem::path& path) {
    json standard_factor = json::object();
    for (const auto& [standard, factor] : params.standard_factor)
        standard_factor[std::string(standard_name(standard))] = factor;
    json preset_factor = json::object();
    for (const auto& [preset, factor] : params.preset_factor)
        preset_factor[std::string(preset_name(preset))] = factor;
    write_json_file(json{{"base_j", params.base_j},
                         {"per_pixel_frame_j", params.per_pixel_frame_j},
                         {"standard_factor", standard_factor},
                         {"preset_factor", preset_factor},
                         {"qp_slope", params.qp_slope},
                         {"noise_rel", params.noise_rel},
                         {"seed", params.seed}},
                    path);
}

} // namespace encergy
