#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "encergy/error.hpp"
#include "encergy/features.hpp"
#include "encergy/rng.hpp"

using namespace encergy;

namespace {

EncodingConfig cfg(const std::string& id, int w, int h, int frames, Standard s, Preset p,
                   int qp) {
    EncodingConfig c;
    c.sequence_id = id;
    c.width = w;
    c.height = h;
    c.frames = frames;
    c.standard = s;
    c.preset = p;
    c.qp = qp;
    return c;
}

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "encergy_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("extract_features follows the fixed column order") {
    const FeatureVector a =
        extract_features(cfg("s", 1920, 1080, 100, Standard::H265, Preset::Ultrafast, 27));
    const FeatureVector want_a{1, 100, 2073600, 0, 1, 0, 1, 0, 27};
    CHECK(a == want_a);

    const FeatureVector b =
        extract_features(cfg("s", 1, 1, 1, Standard::H264, Preset::Slow, 0));
    const FeatureVector want_b{1, 1, 1, 1, 0, 0, 0, 1, 0};
    CHECK(b == want_b);

    const FeatureVector c =
        extract_features(cfg("s", 3840, 2160, 130, Standard::AV1, Preset::Slow, 184));
    const FeatureVector want_c{1, 130, 8294400, 0, 0, 1, 0, 1, 184};
    CHECK(c == want_c);
}

TEST_CASE("feature invariants hold for random valid configs") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto standard = static_cast<Standard>(rng.uniform_int(0, 2));
        const auto preset = static_cast<Preset>(rng.uniform_int(0, 1));
        const QpRange range = qp_range(standard);
        const EncodingConfig c =
            cfg("seq", rng.uniform_int(1, 4000), rng.uniform_int(1, 4000),
                rng.uniform_int(1, 500), standard, preset, rng.uniform_int(range.lo, range.hi));
        const FeatureVector x = extract_features(c);
        CHECK(x[feature::kBias] == 1.0);
        CHECK(x[feature::kH264] + x[feature::kH265] + x[feature::kAv1] == 1.0);
        CHECK(x[feature::kUltrafast] + x[feature::kSlow] == 1.0);
        CHECK(x[feature::kPixels] == double(c.width) * double(c.height));
        // Pure function: same config, same vector.
        CHECK(extract_features(c) == x);
    }
}

TEST_CASE("validate_config enforces the QP ranges") {
    CHECK_THROWS_WITH_AS(validate_config(cfg("s", 64, 64, 10, Standard::H264, Preset::Slow, 52)),
                         doctest::Contains("QpOutOfRange"), Error);
    CHECK_THROWS_WITH_AS(validate_config(cfg("s", 64, 64, 10, Standard::AV1, Preset::Slow, 0)),
                         doctest::Contains("QpOutOfRange"), Error);
    CHECK_NOTHROW(validate_config(cfg("s", 64, 64, 10, Standard::H265, Preset::Slow, 22)));
    CHECK_NOTHROW(validate_config(cfg("s", 64, 64, 10, Standard::H264, Preset::Slow, 0)));
    CHECK_NOTHROW(validate_config(cfg("s", 64, 64, 10, Standard::AV1, Preset::Slow, 255)));
}

TEST_CASE("validate_config enforces dimensions and frames") {
    CHECK_THROWS_WITH_AS(validate_config(cfg("s", 0, 64, 10, Standard::H264, Preset::Slow, 20)),
                         doctest::Contains("NonPositiveDimension"), Error);
    CHECK_THROWS_WITH_AS(validate_config(cfg("s", 64, -3, 10, Standard::H264, Preset::Slow, 20)),
                         doctest::Contains("NonPositiveDimension"), Error);
    CHECK_THROWS_WITH_AS(validate_config(cfg("s", 64, 64, 0, Standard::H264, Preset::Slow, 20)),
                         doctest::Contains("NonPositiveFrameCount"), Error);
    CHECK_THROWS_WITH_AS(validate_config(cfg("a,b", 64, 64, 9, Standard::H264, Preset::Slow, 20)),
                         doctest::Contains("InvalidSequenceId"), Error);
}

TEST_CASE("dataset CSV round-trips bit-exactly") {
    Rng rng(11);
    Dataset d;
    for (int i = 0; i < 60; ++i) {
        const auto standard = static_cast<Standard>(rng.uniform_int(0, 2));
        const QpRange range = qp_range(standard);
        // Energies quantized to nanojoules, as every pipeline writer produces.
        const double energy = rng.uniform_int(0, 2000000000) * 1e-9 * 50.0;
        d.samples.push_back(make_sample(
            cfg("seq" + std::to_string(i), rng.uniform_int(1, 4096), rng.uniform_int(1, 4096),
                rng.uniform_int(1, 400), standard, static_cast<Preset>(rng.uniform_int(0, 1)),
                rng.uniform_int(range.lo, range.hi)),
            std::round(energy * 1e9) / 1e9));
    }
    const auto path = temp_file("roundtrip.csv");
    save_dataset(d, path);
    const Dataset loaded = load_dataset(path);
    REQUIRE(loaded.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Sample& a = d.samples[i];
        const Sample& b = loaded.samples[i];
        CHECK(a.config.sequence_id == b.config.sequence_id);
        CHECK(a.config.width == b.config.width);
        CHECK(a.config.height == b.config.height);
        CHECK(a.config.frames == b.config.frames);
        CHECK(a.config.standard == b.config.standard);
        CHECK(a.config.preset == b.config.preset);
        CHECK(a.config.qp == b.config.qp);
        CHECK(a.energy_j == b.energy_j); // bit-exact
        CHECK(a.features == b.features);
    }

    // Saving what was loaded reproduces the file byte for byte.
    const auto path2 = temp_file("roundtrip2.csv");
    save_dataset(loaded, path2);
    std::ifstream f1(path), f2(path2);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
}

TEST_CASE("load_dataset accepts a header-only file") {
    const auto path = temp_file("empty.csv");
    std::ofstream(path) << "sequence_id,width,height,frames,standard,preset,qp,energy_j\n";
    CHECK(load_dataset(path).size() == 0);
}

TEST_CASE("load_dataset parses one well-formed row") {
    const auto path = temp_file("one.csv");
    std::ofstream(path) << "sequence_id,width,height,frames,standard,preset,qp,energy_j\n"
                           "clip,1280,720,80,H265,slow,27,12.5\n";
    const Dataset d = load_dataset(path);
    REQUIRE(d.size() == 1);
    CHECK(d.samples[0].config.sequence_id == "clip");
    CHECK(d.samples[0].energy_j == 12.5);
    CHECK(d.samples[0].features == extract_features(d.samples[0].config));
}

TEST_CASE("load_dataset rejects schema violations") {
    const auto bad_header = temp_file("badheader.csv");
    std::ofstream(bad_header)
        << "sequence_id,width,height,frames,standard,preset,qp,energy_j,extra\n";
    CHECK_THROWS_WITH_AS(load_dataset(bad_header), doctest::Contains("ParseError"), Error);

    const auto bad_value = temp_file("badvalue.csv");
    std::ofstream(bad_value) << "sequence_id,width,height,frames,standard,preset,qp,energy_j\n"
                                "clip,1280,720,80,H262,slow,27,12.5\n";
    CHECK_THROWS_WITH_AS(load_dataset(bad_value), doctest::Contains("ParseError"), Error);

    const auto bad_qp = temp_file("badqp.csv");
    std::ofstream(bad_qp) << "sequence_id,width,height,frames,standard,preset,qp,energy_j\n"
                             "clip,1280,720,80,H265,slow,300,12.5\n";
    CHECK_THROWS_WITH_AS(load_dataset(bad_qp), doctest::Contains("InvariantViolation"), Error);

    const auto dup = temp_file("dup.csv");
    std::ofstream(dup) << "sequence_id,width,height,frames,standard,preset,qp,energy_j\n"
                          "clip,1280,720,80,H265,slow,27,12.5\n"
                          "clip,1280,720,80,H265,slow,27,13.5\n";
    CHECK_THROWS_WITH_AS(load_dataset(dup), doctest::Contains("InvariantViolation"), Error);

    const auto negative = temp_file("negenergy.csv");
    std::ofstream(negative) << "sequence_id,width,height,frames,standard,preset,qp,energy_j\n"
                               "clip,1280,720,80,H265,slow,27,-1.0\n";
    CHECK_THROWS_WITH_AS(load_dataset(negative), doctest::Contains("InvariantViolation"), Error);
}

TEST_CASE("sample_id is the uniqueness tuple") {
    const auto c = cfg("clip", 1280, 720, 80, Standard::H265, Preset::Slow, 27);
    CHECK(sample_id(c) == "clip|H265|slow|qp27|f80");
}
