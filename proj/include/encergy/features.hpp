#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace encergy {

// Coding standards supported by the target hardware encoder. Integer tags
// are stable and used in serialized artifacts.
enum class Standard : int { H264 = 0, H265 = 1, AV1 = 2 };

// Encoder operating points covered by the model.
enum class Preset : int { Ultrafast = 0, Slow = 1 };

std::string_view standard_name(Standard s);
std::string_view preset_name(Preset p);
std::optional<Standard> try_parse_standard(std::string_view s);
std::optional<Preset> try_parse_preset(std::string_view s);

// Throwing variants for CLI/config parsing (kind: ParseError).
Standard parse_standard(std::string_view s);
Preset parse_preset(std::string_view s);

struct QpRange {
    int lo;
    int hi;
};

// Legal constant-QP range: 0-51 for H264/H265, 1-255 for AV1.
QpRange qp_range(Standard s);

// One encode job as declared up front; nothing here is derived from media.
struct EncodingConfig {
    std::string sequence_id;
    int width = 0;   // pixels
    int height = 0;  // pixels
    int frames = 0;
    Standard standard = Standard::H264;
    Preset preset = Preset::Ultrafast;
    int qp = 0;
};

inline constexpr int kFeatureDim = 9;

// High-level feature encoding of one encode job. Column order is fixed;
// ablation groups and serialized models index into it.
using FeatureVector = std::array<double, kFeatureDim>;

namespace feature {
inline constexpr int kBias = 0;      // always 1
inline constexpr int kFrames = 1;
inline constexpr int kPixels = 2;    // width * height
inline constexpr int kH264 = 3;
inline constexpr int kH265 = 4;
inline constexpr int kAv1 = 5;
inline constexpr int kUltrafast = 6;
inline constexpr int kSlow = 7;
inline constexpr int kQp = 8;
} // namespace feature

// Throws on the violated bound: QpOutOfRange, NonPositiveDimension,
// NonPositiveFrameCount. sequence_id must be CSV-safe (no comma/CR/LF):
// InvalidSequenceId.
void validate_config(const EncodingConfig& config);

// Feature encoding of a validated config. Pure.
FeatureVector extract_features(const EncodingConfig& config);

// Canonical identity of a sample inside reports; unique within a dataset.
std::string sample_id(const EncodingConfig& config);

struct Sample {
    EncodingConfig config;
    FeatureVector features{}; // always extract_features(config)
    double energy_j = 0.0;    // >= 0
};

// Validates the config, checks energy, fills in the features.
Sample make_sample(EncodingConfig config, double energy_j);

struct Dataset {
    std::vector<Sample> samples;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

// Per-sample invariants plus uniqueness of the identity tuple.
void check_dataset(const Dataset& dataset);

// CSV with header exactly:
//   sequence_id,width,height,frames,standard,preset,qp,energy_j
// Rows preserve order; save/load round-trips bit-exactly.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

} // namespace encergy
