#include "encergy/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "encergy/error.hpp"
#include "encergy/format.hpp"
#include "encergy/stats.hpp"

namespace encergy {

namespace {

void check_trace(const PowerTrace& trace) {
    if (trace.samples.size() < 2)
        fail("DegenerateTrace", "power trace needs at least 2 samples");
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const auto& s = trace.samples[i];
        if (!std::isfinite(s.t_s) || !std::isfinite(s.p_w))
            fail("DegenerateTrace", "non-finite trace sample at index " + std::to_string(i));
        if (s.p_w < 0.0)
            fail("DegenerateTrace", "negative power at index " + std::to_string(i));
        if (i > 0 && !(s.t_s > trace.samples[i - 1].t_s))
            fail("DegenerateTrace", "timestamps must be strictly increasing at index " +
                                        std::to_string(i));
    }
}

// Power at time t by linear interpolation; t must be inside the span.
double power_at(const PowerTrace& trace, double t) {
    const auto& s = trace.samples;
    auto it = std::lower_bound(s.begin(), s.end(), t,
                               [](const TracePoint& p, double v) { return p.t_s < v; });
    if (it == s.begin()) return it->p_w;
    if (it == s.end()) return s.back().p_w;
    const TracePoint& hi = *it;
    const TracePoint& lo = *(it - 1);
    if (hi.t_s == t) return hi.p_w;
    const double w = (t - lo.t_s) / (hi.t_s - lo.t_s);
    return lo.p_w + w * (hi.p_w - lo.p_w);
}

} // namespace

PowerTrace load_power_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("ParseError", "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) fail("ParseError", path.string() + ": missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t_s,p_w")
        fail("ParseError", path.string() + ": header must be exactly 't_s,p_w'");

    PowerTrace trace;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            fail("ParseError", path.string() + ": line " + std::to_string(lineno) +
                                   ": expected 2 columns");
        const auto t = try_parse_double(std::string_view(line).substr(0, comma));
        const auto p = try_parse_double(std::string_view(line).substr(comma + 1));
        if (!t || !p)
            fail("ParseError",
                 path.string() + ": line " + std::to_string(lineno) + ": invalid number");
        trace.samples.push_back({*t, *p});
    }
    check_trace(trace);
    return trace;
}

void save_power_trace(const PowerTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) fail("ParseError", "cannot write " + path.string());
    out << "t_s,p_w\n";
    for (const TracePoint& s : trace.samples)
        out << format_full(s.t_s) << ',' << format_full(s.p_w) << '\n';
    if (!out.flush()) fail("ParseError", "failed writing " + path.string());
}

double integrate_power(const PowerTrace& trace, double t_start, double duration) {
    check_trace(trace);
    if (!(duration > 0.0) || !std::isfinite(t_start) || !std::isfinite(duration))
        fail("WindowOutOfRange", "integration window must have positive finite duration");
    const double t_stop = t_start + duration;
    if (t_start < trace.t_begin() || t_stop > trace.t_end())
        fail("WindowOutOfRange",
             "window [" + format_full(t_start) + ", " + format_full(t_stop) +
                 "] outside trace span [" + format_full(trace.t_begin()) + ", " +
                 format_full(trace.t_end()) + "]");

    const auto& s = trace.samples;
    // Interior sample knots strictly inside the window.
    auto first = std::upper_bound(s.begin(), s.end(), t_start,
                                  [](double v, const TracePoint& p) { return v < p.t_s; });
    auto last = std::lower_bound(s.begin(), s.end(), t_stop,
                                 [](const TracePoint& p, double v) { return p.t_s < v; });

    double t_prev = t_start;
    double p_prev = power_at(trace, t_start);
    double energy = 0.0;
    for (auto it = first; it != last; ++it) {
        energy += 0.5 * (p_prev + it->p_w) * (it->t_s - t_prev);
        t_prev = it->t_s;
        p_prev = it->p_w;
    }
    const double p_stop = power_at(trace, t_stop);
    energy += 0.5 * (p_prev + p_stop) * (t_stop - t_prev);
    return energy;
}

double encoding_energy(double e_dynamic, double e_static) {
    if (!std::isfinite(e_dynamic) || !std::isfinite(e_static))
        fail("NonFiniteInput", "encoding_energy requires finite inputs");
    return e_dynamic - e_static;
}

void validate_cit_config(const CitConfig& cfg) {
    if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0))
        fail("InvalidProbability", "alpha must be inside (0, 1)");
    if (!(cfg.beta > 0.0)) fail("InvalidProbability", "beta must be > 0");
    if (cfg.m_min < 2 || cfg.m_min > cfg.m_max)
        fail("InvalidProbability", "need 2 <= m_min <= m_max");
}

double cit_halfwidth(std::span<const double> values, double alpha,
                     QuantileConvention convention) {
    if (values.size() < 2) fail("TooFewValues", "confidence interval needs at least 2 values");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        fail("InvalidProbability", "alpha must be inside (0, 1)");
    const auto m = static_cast<double>(values.size());
    const double s = sample_stddev(values);
    const double q = convention == QuantileConvention::TwoSided ? 0.5 * (1.0 + alpha) : alpha;
    const double t = student_t_quantile(q, static_cast<int>(values.size()) - 1);
    return 2.0 * (s / std::sqrt(m)) * t;
}

bool cit_converged(std::span<const double> values, const CitConfig& cfg) {
    validate_cit_config(cfg);
    if (values.size() < 2) fail("TooFewValues", "confidence test needs at least 2 values");
    const double mu = mean(values);
    if (!(mu > 0.0))
        fail("NonPositiveMean", "confidence test undefined for mean " + format_full(mu));
    return cit_halfwidth(values, cfg.alpha, cfg.quantile_convention) < cfg.beta * mu;
}

TraceReplayProbe::TraceReplayProbe(const std::filesystem::path& job_dir) : dir_(job_dir) {
    if (!std::filesystem::is_directory(dir_))
        fail("ParseError", "trace directory not found: " + dir_.string());
    std::map<long long, std::filesystem::path> dyn, stat;
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        auto classify = [&](std::string_view prefix, auto& into) {
            if (name.size() <= prefix.size() + 4 || name.rfind(prefix, 0) != 0 ||
                !name.ends_with(".csv"))
                return;
            const auto k = try_parse_int(
                std::string_view(name).substr(prefix.size(), name.size() - prefix.size() - 4));
            if (k) into[*k] = entry.path();
        };
        classify("dyn_", dyn);
        classify("stat_", stat);
    }
    for (const auto& [k, dyn_path] : dyn) {
        auto it = stat.find(k);
        if (it == stat.end())
            fail("ParseError", "missing stat_" + std::to_string(k) + ".csv in " + dir_.string());
        pairs_.emplace_back(dyn_path, it->second);
    }
    if (pairs_.empty())
        fail("ParseError", "no dyn_<k>.csv/stat_<k>.csv pairs in " + dir_.string());
}

double TraceReplayProbe::next_measurement() {
    if (next_ >= pairs_.size())
        fail("ProbeExhausted", "trace replay ran out after " + std::to_string(pairs_.size()) +
                                   " measurements in " + dir_.string());
    const auto& [dyn_path, stat_path] = pairs_[next_++];
    const PowerTrace dyn = load_power_trace(dyn_path);
    const PowerTrace stat = load_power_trace(stat_path);
    // Equal-duration windows: T is the encoding span of the dynamic trace.
    const double duration = dyn.t_end() - dyn.t_begin();
    const double e_dyn = integrate_power(dyn, dyn.t_begin(), duration);
    const double e_stat = integrate_power(stat, stat.t_begin(), duration);
    return encoding_energy(e_dyn, e_stat);
}

MeasurementResult measure_until_confident(EnergyProbe& probe, const CitConfig& cfg) {
    validate_cit_config(cfg);
    MeasurementResult result;
    result.history.reserve(static_cast<std::size_t>(cfg.m_min));
    while (static_cast<int>(result.history.size()) < cfg.m_max) {
        const double e = probe.next_measurement();
        if (!std::isfinite(e)) fail("NonFiniteInput", "probe produced a non-finite energy");
        result.history.push_back(e);
        if (static_cast<int>(result.history.size()) < cfg.m_min) continue;
        try {
            if (cit_converged(result.history, cfg)) {
                result.converged = true;
                break;
            }
        } catch (const Error& e) {
            // Non-positive running mean: the test is undefined, keep measuring.
            if (e.kind() != "NonPositiveMean") throw;
        }
    }
    result.m = static_cast<int>(result.history.size());
    result.mean_energy_j = mean(result.history);
    result.final_halfwidth =
        cit_halfwidth(result.history, cfg.alpha, cfg.quantile_convention);
    return result;
}

} // namespace encergy
