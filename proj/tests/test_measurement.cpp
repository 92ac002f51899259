#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "encergy/error.hpp"
#include "encergy/measurement.hpp"
#include "encergy/rng.hpp"

using namespace encergy;

namespace {

PowerTrace constant_trace(double watts, double t0, double t1, int samples) {
    PowerTrace trace;
    for (int i = 0; i < samples; ++i) {
        const double t = t0 + (t1 - t0) * i / (samples - 1);
        trace.samples.push_back({t, watts});
    }
    return trace;
}

std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "encergy_tests" / name;
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("integrate_power: constant and ramp") {
    // 5 W over 2 s -> 10 J
    CHECK(integrate_power(constant_trace(5.0, 0.0, 2.0, 21), 0.0, 2.0) ==
          doctest::Approx(10.0).epsilon(1e-12));

    // linear ramp 0 -> 10 W over 1 s -> 5 J (triangle area)
    PowerTrace ramp;
    ramp.samples = {{0.0, 0.0}, {1.0, 10.0}};
    CHECK(integrate_power(ramp, 0.0, 1.0) == doctest::Approx(5.0).epsilon(1e-12));

    // sub-window of the ramp with interpolated boundaries
    CHECK(integrate_power(ramp, 0.25, 0.5) == doctest::Approx(0.5 * (2.5 + 7.5) * 0.5));
}

TEST_CASE("integrate_power matches the analytic sinusoid integral at 1 kHz") {
    // P(t) = 5 + 2 sin(2 pi f t), f = 5 Hz, over [0, 2]:
    // integral = 5 t - (2 / (2 pi f)) cos(2 pi f t)
    const double f = 5.0;
    const double w = 2.0 * std::numbers::pi * f;
    PowerTrace trace;
    for (int i = 0; i <= 2000; ++i) {
        const double t = i * 1e-3;
        trace.samples.push_back({t, 5.0 + 2.0 * std::sin(w * t)});
    }
    const double analytic = 5.0 * 2.0 - (2.0 / w) * (std::cos(w * 2.0) - 1.0);
    const double numeric = integrate_power(trace, 0.0, 2.0);
    CHECK(std::fabs(numeric - analytic) / std::fabs(analytic) < 1e-4);
}

TEST_CASE("integrate_power is additive over adjacent windows") {
    Rng rng(3);
    PowerTrace trace;
    double t = 0.0;
    for (int i = 0; i < 400; ++i) {
        trace.samples.push_back({t, 2.0 + rng.uniform01()});
        t += 0.001 + 0.004 * rng.uniform01();
    }
    const double t0 = trace.t_begin(), t2 = trace.t_end();
    for (double split : {0.3, 0.5, 0.777}) {
        const double t1 = t0 + split * (t2 - t0);
        const double whole = integrate_power(trace, t0, t2 - t0);
        const double left = integrate_power(trace, t0, t1 - t0);
        const double right = integrate_power(trace, t1, t2 - t1);
        CHECK(std::fabs(left + right - whole) <= 1e-12 * std::fabs(whole));
    }
}

TEST_CASE("integrate_power window and trace validation") {
    const PowerTrace trace = constant_trace(1.0, 0.0, 1.0, 11);
    CHECK_THROWS_WITH_AS(integrate_power(trace, -0.1, 0.5), doctest::Contains("WindowOutOfRange"),
                         Error);
    CHECK_THROWS_WITH_AS(integrate_power(trace, 0.8, 0.5), doctest::Contains("WindowOutOfRange"),
                         Error);
    CHECK_THROWS_WITH_AS(integrate_power(trace, 0.2, 0.0), doctest::Contains("WindowOutOfRange"),
                         Error);
    PowerTrace degenerate;
    degenerate.samples = {{0.0, 1.0}};
    CHECK_THROWS_WITH_AS(integrate_power(degenerate, 0.0, 0.0001),
                         doctest::Contains("DegenerateTrace"), Error);
}

TEST_CASE("encoding_energy passes the sign through") {
    CHECK(encoding_energy(50.0, 30.0) == 20.0);
    CHECK(encoding_energy(12.34, 12.34) == 0.0);
    CHECK(encoding_energy(30.0, 50.0) == -20.0);

    const PowerTrace trace = constant_trace(3.0, 0.0, 4.0, 9);
    const double e = integrate_power(trace, 0.0, 4.0);
    CHECK(encoding_energy(e, e) == 0.0);
}

TEST_CASE("cit_halfwidth frozen example and properties") {
    const std::vector<double> same{10.0, 10.0, 10.0};
    CHECK(cit_halfwidth(same, 0.99) == 0.0);

    // s = sqrt(1/2), t_{0.995}(1) = 63.657: halfwidth = 2*(s/sqrt(2))*t = t
    const std::vector<double> two{10.0, 11.0};
    CHECK(cit_halfwidth(two, 0.99) == doctest::Approx(63.656741162874).epsilon(1e-6));

    // homogeneity: scaling values scales the halfwidth
    const std::vector<double> scaled{30.0, 33.0};
    CHECK(cit_halfwidth(scaled, 0.99) == doctest::Approx(3.0 * cit_halfwidth(two, 0.99)));

    CHECK_THROWS_WITH_AS(cit_halfwidth(std::vector<double>{1.0}, 0.99),
                         doctest::Contains("TooFewValues"), Error);
}

TEST_CASE("cit_halfwidth strictly decreases in m at fixed sample sd") {
    // Two symmetric outliers sized so the sample standard deviation is
    // exactly 1 for every m; both s/sqrt(m) and t(m-1) then shrink.
    double prev = 1e300;
    for (int m = 2; m <= 60; ++m) {
        std::vector<double> v(static_cast<std::size_t>(m), 100.0);
        const double d = std::sqrt((m - 1) / 2.0);
        v[0] += d;
        v[1 % m] -= d;
        const double hw = cit_halfwidth(v, 0.99);
        CHECK(hw < prev);
        prev = hw;
    }
}

TEST_CASE("cit_halfwidth quantile convention knob") {
    const std::vector<double> two{10.0, 11.0};
    // One-sided reading uses t(alpha, m-1) directly: t(0.99, 1) = 31.8205.
    const double one_sided = cit_halfwidth(two, 0.99, QuantileConvention::OneSided);
    CHECK(one_sided == doctest::Approx(31.820515953758).epsilon(1e-6));
    CHECK(one_sided < cit_halfwidth(two, 0.99, QuantileConvention::TwoSided));
}

TEST_CASE("cit_converged thresholds and errors") {
    const std::vector<double> same{10.0, 10.0, 10.0};
    CitConfig cfg;
    CHECK(cit_converged(same, cfg));

    const std::vector<double> two{10.0, 11.0};
    CHECK_FALSE(cit_converged(two, cfg)); // halfwidth ~63.66 >= 0.21

    const std::vector<double> zero_mean{-1.0, 1.0};
    CHECK_THROWS_WITH_AS(cit_converged(zero_mean, cfg), doctest::Contains("NonPositiveMean"),
                         Error);
}

TEST_CASE("measure_until_confident: zero noise converges at m_min") {
    SyntheticProbe probe(100.0, 0.0, 1);
    CitConfig cfg;
    const MeasurementResult r = measure_until_confident(probe, cfg);
    CHECK(r.converged);
    CHECK(r.m == cfg.m_min);
    CHECK(r.mean_energy_j == doctest::Approx(100.0));
    CHECK(r.history.size() == static_cast<std::size_t>(r.m));
    CHECK(r.final_halfwidth == 0.0);
}

TEST_CASE("measure_until_confident: caps at m_max without converging") {
    SyntheticProbe probe(100.0, 0.5, 7);
    CitConfig cfg;
    cfg.m_max = 5;
    const MeasurementResult r = measure_until_confident(probe, cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.m == 5);
    CHECK(r.history.size() == 5);
}

TEST_CASE("measure_until_confident replays identically for the same seed") {
    CitConfig cfg;
    SyntheticProbe p1(42.0, 0.05, 1234);
    SyntheticProbe p2(42.0, 0.05, 1234);
    const MeasurementResult a = measure_until_confident(p1, cfg);
    const MeasurementResult b = measure_until_confident(p2, cfg);
    CHECK(a.m == b.m);
    CHECK(a.history == b.history);
    CHECK(a.mean_energy_j == b.mean_energy_j);
}

TEST_CASE("trace replay probe consumes pairs and errors when exhausted") {
    const auto dir = temp_dir("job1");
    // Two pairs: dynamic at 5 W for 2 s, static at 1 W -> 8 J each.
    for (int k = 1; k <= 2; ++k) {
        save_power_trace(constant_trace(5.0, 0.0, 2.0, 41), dir / ("dyn_" + std::to_string(k) + ".csv"));
        save_power_trace(constant_trace(1.0, 10.0, 13.0, 61), dir / ("stat_" + std::to_string(k) + ".csv"));
    }
    TraceReplayProbe probe(dir);
    CHECK(probe.pairs_total() == 2);
    CHECK(probe.next_measurement() == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(probe.next_measurement() == doctest::Approx(8.0).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(probe.next_measurement(), doctest::Contains("ProbeExhausted"), Error);
}

TEST_CASE("trace replay feeds the measurement loop") {
    const auto dir = temp_dir("job2");
    for (int k = 0; k < 3; ++k) {
        save_power_trace(constant_trace(4.0, 0.0, 1.0, 11), dir / ("dyn_" + std::to_string(k) + ".csv"));
        save_power_trace(constant_trace(1.5, 0.0, 2.0, 21), dir / ("stat_" + std::to_string(k) + ".csv"));
    }
    TraceReplayProbe probe(dir);
    CitConfig cfg;
    const MeasurementResult r = measure_until_confident(probe, cfg);
    CHECK(r.converged);
    CHECK(r.m == 2);
    CHECK(r.mean_energy_j == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("trace replay requires an equal-duration static window") {
    const auto dir = temp_dir("job3");
    save_power_trace(constant_trace(4.0, 0.0, 2.0, 21), dir / "dyn_0.csv");
    save_power_trace(constant_trace(1.0, 0.0, 1.0, 11), dir / "stat_0.csv"); // too short
    TraceReplayProbe probe(dir);
    CHECK_THROWS_WITH_AS(probe.next_measurement(), doctest::Contains("WindowOutOfRange"), Error);
}

TEST_CASE("power trace CSV parsing validates the schema") {
    const auto dir = temp_dir("traces");
    const auto good = dir / "good.csv";
    std::ofstream(good) << "t_s,p_w\n0.0,1.0\n0.5,2.0\n";
    const PowerTrace t = load_power_trace(good);
    CHECK(t.samples.size() == 2);

    const auto bad_order = dir / "bad_order.csv";
    std::ofstream(bad_order) << "t_s,p_w\n0.5,1.0\n0.5,2.0\n";
    CHECK_THROWS_WITH_AS(load_power_trace(bad_order), doctest::Contains("DegenerateTrace"),
                         Error);

    const auto bad_power = dir / "bad_power.csv";
    std::ofstream(bad_power) << "t_s,p_w\n0.0,1.0\n0.5,-2.0\n";
    CHECK_THROWS_WITH_AS(load_power_trace(bad_power), doctest::Contains("DegenerateTrace"),
                         Error);

    const auto bad_header = dir / "bad_header.csv";
    std::ofstream(bad_header) << "time,power\n0.0,1.0\n";
    CHECK_THROWS_WITH_AS(load_power_trace(bad_header), doctest::Contains("ParseError"), Error);
}
