#include "encergy/features.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "encergy/error.hpp"
#include "encergy/format.hpp"

namespace encergy {

std::string_view standard_name(Standard s) {
    switch (s) {
        case Standard::H264: return "H264";
        case Standard::H265: return "H265";
        case Standard::AV1: return "AV1";
    }
    fail("ParseError", "unknown standard tag");
}

std::string_view preset_name(Preset p) {
    switch (p) {
        case Preset::Ultrafast: return "ultrafast";
        case Preset::Slow: return "slow";
    }
    fail("ParseError", "unknown preset tag");
}

std::optional<Standard> try_parse_standard(std::string_view s) {
    if (s == "H264") return Standard::H264;
    if (s == "H265") return Standard::H265;
    if (s == "AV1") return Standard::AV1;
    return std::nullopt;
}

std::optional<Preset> try_parse_preset(std::string_view s) {
    if (s == "ultrafast") return Preset::Ultrafast;
    if (s == "slow") return Preset::Slow;
    return std::nullopt;
}

Standard parse_standard(std::string_view s) {
    if (auto v = try_parse_standard(s)) return *v;
    fail("ParseError", "unknown standard '" + std::string(s) + "' (expected H264|H265|AV1)");
}

Preset parse_preset(std::string_view s) {
    if (auto v = try_parse_preset(s)) return *v;
    fail("ParseError", "unknown preset '" + std::string(s) + "' (expected ultrafast|slow)");
}

QpRange qp_range(Standard s) {
    return s == Standard::AV1 ? QpRange{1, 255} : QpRange{0, 51};
}

void validate_config(const EncodingConfig& config) {
    if (config.width <= 0 || config.height <= 0)
        fail("NonPositiveDimension", "width and height must be positive, got " +
                                         std::to_string(config.width) + "x" +
                                         std::to_string(config.height));
    if (config.frames <= 0)
        fail("NonPositiveFrameCount", "frame count must be positive, got " +
                                          std::to_string(config.frames));
    const QpRange range = qp_range(config.standard);
    if (config.qp < range.lo || config.qp > range.hi)
        fail("QpOutOfRange", std::string(standard_name(config.standard)) + " allows QP " +
                                 std::to_string(range.lo) + "-" + std::to_string(range.hi) +
                                 ", got " + std::to_string(config.qp));
    for (char c : config.sequence_id)
        if (c == ',' || c == '\n' || c == '\r')
            fail("InvalidSequenceId", "sequence_id must not contain ',' or line breaks");
}

FeatureVector extract_features(const EncodingConfig& config) {
    FeatureVector x{};
    x[feature::kBias] = 1.0;
    x[feature::kFrames] = static_cast<double>(config.frames);
    x[feature::kPixels] =
        static_cast<double>(config.width) * static_cast<double>(config.height);
    x[feature::kH264] = config.standard == Standard::H264 ? 1.0 : 0.0;
    x[feature::kH265] = config.standard == Standard::H265 ? 1.0 : 0.0;
    x[feature::kAv1] = config.standard == Standard::AV1 ? 1.0 : 0.0;
    x[feature::kUltrafast] = config.preset == Preset::Ultrafast ? 1.0 : 0.0;
    x[feature::kSlow] = config.preset == Preset::Slow ? 1.0 : 0.0;
    x[feature::kQp] = static_cast<double>(config.qp);
    return x;
}

std::string sample_id(const EncodingConfig& config) {
    std::string id = config.sequence_id;
    id += '|';
    id += standard_name(config.standard);
    id += '|';
    id += preset_name(config.preset);
    id += "|qp";
    id += std::to_string(config.qp);
    id += "|f";
    id += std::to_string(config.frames);
    return id;
}

Sample make_sample(EncodingConfig config, double energy_j) {
    validate_config(config);
    if (!std::isfinite(energy_j) || energy_j < 0.0)
        fail("InvariantViolation", "energy_j must be finite and >= 0, got " +
                                       format_full(energy_j));
    Sample s;
    s.features = extract_features(config);
    s.config = std::move(config);
    s.energy_j = energy_j;
    return s;
}

void check_dataset(const Dataset& dataset) {
    std::unordered_set<std::string> seen;
    seen.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const Sample& s = dataset.samples[i];
        validate_config(s.config);
        if (s.features != extract_features(s.config))
            fail("InvariantViolation",
                 "sample " + std::to_string(i) + ": features do not match the config");
        if (!std::isfinite(s.energy_j) || s.energy_j < 0.0)
            fail("InvariantViolation",
                 "sample " + std::to_string(i) + ": energy_j must be finite and >= 0");
        if (!seen.insert(sample_id(s.config)).second)
            fail("InvariantViolation",
                 "sample " + std::to_string(i) + ": duplicate identity tuple " +
                     sample_id(s.config));
    }
}

namespace {

constexpr std::string_view kHeader = "sequence_id,width,height,frames,standard,preset,qp,energy_j";

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return fields;
}

[[noreturn]] void parse_fail(int line, int column, const std::string& reason) {
    fail("ParseError",
         "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + reason);
}

long long parse_int_field(std::string_view field, int line, int column, const char* what) {
    auto v = try_parse_int(field);
    if (!v) parse_fail(line, column, std::string("invalid ") + what + " '" + std::string(field) + "'");
    return *v;
}

} // namespace

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("ParseError", "cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) fail("ParseError", "line 1, column 1: missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader)
        parse_fail(1, 1, "header must be exactly '" + std::string(kHeader) + "'");

    Dataset dataset;
    std::unordered_set<std::string> seen;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const auto fields = split_fields(line);
        if (fields.size() != 8)
            parse_fail(lineno, 1, "expected 8 columns, got " + std::to_string(fields.size()));

        EncodingConfig config;
        config.sequence_id = std::string(fields[0]);
        config.width = static_cast<int>(parse_int_field(fields[1], lineno, 2, "width"));
        config.height = static_cast<int>(parse_int_field(fields[2], lineno, 3, "height"));
        config.frames = static_cast<int>(parse_int_field(fields[3], lineno, 4, "frames"));
        if (auto s = try_parse_standard(fields[4]))
            config.standard = *s;
        else
            parse_fail(lineno, 5, "unknown standard '" + std::string(fields[4]) + "'");
        if (auto p = try_parse_preset(fields[5]))
            config.preset = *p;
        else
            parse_fail(lineno, 6, "unknown preset '" + std::string(fields[5]) + "'");
        config.qp = static_cast<int>(parse_int_field(fields[6], lineno, 7, "qp"));
        const auto energy = try_parse_double(fields[7]);
        if (!energy) parse_fail(lineno, 8, "invalid energy_j '" + std::string(fields[7]) + "'");

        const std::size_t index = dataset.samples.size();
        try {
            dataset.samples.push_back(make_sample(std::move(config), *energy));
        } catch (const Error& e) {
            fail("InvariantViolation", "sample " + std::to_string(index) + ": " + e.what());
        }
        if (!seen.insert(sample_id(dataset.samples.back().config)).second)
            fail("InvariantViolation",
                 "sample " + std::to_string(index) + ": duplicate identity tuple");
    }
    return dataset;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) fail("ParseError", "cannot write " + path.string());
    out << kHeader << '\n';
    char energy[400];
    for (const Sample& s : dataset.samples) {
        std::snprintf(energy, sizeof(energy), "%.9f", s.energy_j);
        out << s.config.sequence_id << ',' << s.config.width << ',' << s.config.height << ','
            << s.config.frames << ',' << standard_name(s.config.standard) << ','
            << preset_name(s.config.preset) << ',' << s.config.qp << ',' << energy << '\n';
    }
    if (!out.flush()) fail("ParseError", "failed writing " + path.string());
}

} // namespace encergy
