#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "encergy/features.hpp"

namespace encergy {

struct Resolution {
    int width;
    int height;
};

// Experimental design of a synthetic corpus: one class per resolution, a
// fixed number of sequences per class, and the full cross of standards,
// presets, and per-standard QP grids.
struct CorpusSpec {
    std::vector<Resolution> resolutions;
    std::vector<Standard> standards;
    std::vector<Preset> presets;
    std::map<Standard, std::vector<int>> qp_grid;
    int sequences_per_class = 5;
    int frame_min = 65; // frame count drawn uniformly per sequence
    int frame_max = 130;
    std::uint64_t seed = 42;
};

// 270p/360p/720p/1080p/2160p, all standards and presets, four QPs each.
CorpusSpec default_corpus_spec();

// Parametric ground-truth energy standing in for the measurement rig:
//   (base + ppf * pixels * frames * std_factor * preset_factor
//         * (1 + qp_slope * (qp - qp_mid))) * exp(eps),
// eps ~ N(0, noise_rel^2), qp_mid the midpoint of the standard's QP range.
struct OracleParams {
    double base_j = 0.5;
    double per_pixel_frame_j = 2e-8;
    std::map<Standard, double> standard_factor;
    std::map<Preset, double> preset_factor;
    double qp_slope = 0.0;
    double noise_rel = 0.05;
    std::uint64_t seed = 42;
};

OracleParams default_oracle_params();

void validate_corpus_spec(const CorpusSpec& spec);
void validate_oracle_params(const OracleParams& params);

// Deterministic per (params.seed, config, draw_index).
double oracle_energy(const EncodingConfig& config, const OracleParams& params,
                     int draw_index = 0);

// One sample per (resolution, sequence, standard, preset, qp) combination.
// Frame counts are drawn once per (resolution, sequence) and reused across
// that sequence's combinations. Energies are quantized to nanojoules so the
// dataset CSV round-trips bit-exactly.
Dataset generate_corpus(const CorpusSpec& spec, const OracleParams& params);

// JSON config files consumed by the CLI.
CorpusSpec load_corpus_spec(const std::filesystem::path& path);
OracleParams load_oracle_params(const std::filesystem::path& path);
void save_corpus_spec(const CorpusSpec& spec, const std::filesystem::path& path);
void save_oracle_params(const OracleParams& params, const std::filesystem::path& path);

} // namespace encergy
