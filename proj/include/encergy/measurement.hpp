#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "encergy/rng.hpp"

namespace encergy {

struct TracePoint {
    double t_s; // seconds
    double p_w; // watts
};

// Sampled power over time; t strictly increasing, p >= 0, at least two
// samples for integration.
struct PowerTrace {
    std::vector<TracePoint> samples;

    double t_begin() const { return samples.front().t_s; }
    double t_end() const { return samples.back().t_s; }
};

// CSV with header `t_s,p_w`.
PowerTrace load_power_trace(const std::filesystem::path& path);
void save_power_trace(const PowerTrace& trace, const std::filesystem::path& path);

// Trapezoidal integral of power over [t_start, t_start + duration], in
// joules. Window boundaries are linearly interpolated between surrounding
// samples; the window must lie within the trace span.
double integrate_power(const PowerTrace& trace, double t_start, double duration);

// E_enc = E_dynamic - E_static. May be negative when the idle baseline is
// noisy; callers decide how to handle the sign.
double encoding_energy(double e_dynamic, double e_static);

// Which t quantile realizes the confidence level alpha: the full-width
// reading uses (1 + alpha) / 2, the one-sided reading uses alpha directly.
enum class QuantileConvention { TwoSided, OneSided };

// Statistical-sufficiency parameters of the repeat-until-confident loop.
struct CitConfig {
    double alpha = 0.99; // confidence level
    double beta = 0.02;  // acceptable relative deviation from the mean
    int m_min = 2;
    int m_max = 200;
    QuantileConvention quantile_convention = QuantileConvention::TwoSided;
};

void validate_cit_config(const CitConfig& cfg);

// Half width 2 * (s / sqrt(m)) * t_q(m - 1) of the confidence interval
// around the running mean; s is the sample standard deviation (m - 1).
double cit_halfwidth(std::span<const double> values, double alpha,
                     QuantileConvention convention = QuantileConvention::TwoSided);

// True iff cit_halfwidth(values, alpha) < beta * mean(values). The mean
// must be positive for the test to be meaningful.
bool cit_converged(std::span<const double> values, const CitConfig& cfg);

// Source of repeated energy measurements. Stands in for the powermeter rig;
// real-instrument integration would be another implementation of this.
class EnergyProbe {
public:
    virtual ~EnergyProbe() = default;
    virtual double next_measurement() = 0; // joules
};

// mu * (1 + sigma_rel * N(0,1)) per draw, deterministic per seed.
class SyntheticProbe final : public EnergyProbe {
public:
    SyntheticProbe(double mu, double sigma_rel, std::uint64_t seed)
        : mu_(mu), sigma_rel_(sigma_rel), rng_(seed) {}

    double next_measurement() override { return mu_ * (1.0 + sigma_rel_ * rng_.normal()); }

private:
    double mu_;
    double sigma_rel_;
    Rng rng_;
};

// Replays dyn_<k>.csv / stat_<k>.csv pairs from a job directory in
// ascending k. Per-pair energy: dynamic integral over the full trace span
// minus the static integral over an equal-duration window starting at the
// beginning of the static trace. Errors with ProbeExhausted when the pairs
// run out.
class TraceReplayProbe final : public EnergyProbe {
public:
    explicit TraceReplayProbe(const std::filesystem::path& job_dir);

    double next_measurement() override;

    int pairs_total() const { return static_cast<int>(pairs_.size()); }

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::filesystem::path, std::filesystem::path>> pairs_;
    std::size_t next_ = 0;
};

struct MeasurementResult {
    double mean_energy_j = 0.0; // arithmetic mean of history
    int m = 0;                  // number of measurements taken
    bool converged = false;
    std::vector<double> history;
    double final_halfwidth = 0.0;
};

// Draws measurements one at a time; once m >= m_min the confidence test
// runs after every draw, and the loop stops at the first success or at
// m_max with converged=false. History records every draw in order.
MeasurementResult measure_until_confident(EnergyProbe& probe, const CitConfig& cfg);

} // namespace encergy
