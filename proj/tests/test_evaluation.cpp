#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "encergy/corpus.hpp"
#include "encergy/error.hpp"
#include "encergy/evaluation.hpp"
#include "encergy/rng.hpp"

using namespace encergy;

namespace {

// Small fast fit budget for unit-level cross-validation runs.
FitOptions quick_opts() {
    FitOptions opts;
    opts.restarts = 2;
    opts.max_iterations = 60;
    return opts;
}

// Compact noisy corpus for evaluation tests.
Dataset small_corpus(std::uint64_t seed, double noise_rel) {
    CorpusSpec spec = default_corpus_spec();
    spec.sequences_per_class = 1;
    spec.qp_grid[Standard::H264] = {22, 37};
    spec.qp_grid[Standard::H265] = {22, 37};
    spec.qp_grid[Standard::AV1] = {108, 184};
    spec.seed = seed;
    OracleParams params = default_oracle_params();
    params.noise_rel = noise_rel;
    params.seed = seed;
    return generate_corpus(spec, params); // 5 * 1 * 3 * 2 * 2 = 60 samples
}

// Energy exactly linear in the features (frames), so LR is the true model.
Dataset linear_corpus(int n) {
    Dataset d;
    for (int i = 0; i < n; ++i) {
        EncodingConfig c;
        c.sequence_id = "lin" + std::to_string(i);
        c.width = 1920;
        c.height = 1080;
        c.frames = 60 + 2 * i;
        c.standard = Standard::H264;
        c.preset = Preset::Slow;
        c.qp = 27;
        d.samples.push_back(make_sample(std::move(c), 5.0 + 0.5 * (60 + 2 * i)));
    }
    return d;
}

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "encergy_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("mape closed-form values") {
    CHECK(mape(std::vector<double>{10.0}, std::vector<double>{10.0}) == 0.0);
    // (|10-9|/10 + |20-22|/20)/2 * 100 = (0.1 + 0.1)/2 * 100 = 10
    CHECK(mape(std::vector<double>{10.0, 20.0}, std::vector<double>{9.0, 22.0}) ==
          doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("mape is scale invariant and sign sensitive") {
    Rng rng(17);
    std::vector<double> t, e, t3, e3;
    for (int i = 0; i < 50; ++i) {
        t.push_back(rng.uniform(1.0, 20.0));
        e.push_back(rng.uniform(0.5, 25.0));
        t3.push_back(3.0 * t.back());
        e3.push_back(3.0 * e.back());
    }
    CHECK(mape(t, e) == doctest::Approx(mape(t3, e3)).epsilon(1e-12));
    CHECK(mape(t, e) >= 0.0);
    CHECK(mape(t, t) == 0.0);
}

TEST_CASE("mape input validation") {
    CHECK_THROWS_WITH_AS(mape(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}),
                         doctest::Contains("LengthMismatch"), Error);
    CHECK_THROWS_WITH_AS(mape(std::vector<double>{0.0}, std::vector<double>{1.0}),
                         doctest::Contains("NonPositiveTrueValue"), Error);
}

TEST_CASE("kfold assignment shapes") {
    const FoldAssignment f1 = kfold_indices(10, 10, 1);
    std::vector<int> count1(10, 0);
    for (int fold : f1.fold_of) ++count1[static_cast<std::size_t>(fold)];
    for (int c : count1) CHECK(c == 1);

    const FoldAssignment f2 = kfold_indices(11, 10, 1);
    std::vector<int> count2(10, 0);
    for (int fold : f2.fold_of) ++count2[static_cast<std::size_t>(fold)];
    std::sort(count2.begin(), count2.end());
    CHECK(count2.front() == 1);
    CHECK(count2.back() == 2);

    const FoldAssignment a = kfold_indices(40, 7, 9);
    const FoldAssignment b = kfold_indices(40, 7, 9);
    CHECK(a.fold_of == b.fold_of);
    const FoldAssignment c = kfold_indices(40, 7, 10);
    CHECK(a.fold_of != c.fold_of);

    CHECK_THROWS_WITH_AS((void)kfold_indices(5, 6, 1), doctest::Contains("InvalidK"), Error);
    CHECK_THROWS_WITH_AS((void)kfold_indices(5, 1, 1), doctest::Contains("InvalidK"), Error);
}

TEST_CASE("cross_validate covers every sample exactly once") {
    const Dataset d = linear_corpus(20);
    const CvReport report = cross_validate(d, ModelKind::Lr, 2, 7);
    CHECK(report.per_sample.size() == 20);
    std::set<std::string> ids;
    for (const CvRecord& rec : report.per_sample) ids.insert(rec.sample_id);
    CHECK(ids.size() == 20);
    std::set<int> folds;
    for (const CvRecord& rec : report.per_sample) folds.insert(rec.fold);
    CHECK(folds == std::set<int>{0, 1});
}

TEST_CASE("cross_validate with LR nails a noiseless linear corpus") {
    const Dataset d = linear_corpus(30);
    const CvReport report = cross_validate(d, ModelKind::Lr, 10, 42);
    CHECK(report.mape_percent < 1e-6);
}

TEST_CASE("cross_validate with GPR stays under 5% on a noiseless oracle corpus") {
    // Dense enough that every held-out cell has close training neighbors.
    CorpusSpec spec = default_corpus_spec();
    spec.sequences_per_class = 2;
    OracleParams params = default_oracle_params();
    params.noise_rel = 0.0;
    const Dataset d = generate_corpus(spec, params); // 240 samples
    const CvReport report = cross_validate(d, ModelKind::Gpr, 10, 42, quick_opts());
    CHECK(report.mape_percent < 5.0);
}

TEST_CASE("cross_validate report is independent of row order") {
    Dataset d = small_corpus(3, 0.05);
    const CvReport base = cross_validate(d, ModelKind::Gpr, 5, 42, quick_opts());

    // Rotate the rows; canonical ordering must hide this entirely.
    std::rotate(d.samples.begin(), d.samples.begin() + 17, d.samples.end());
    const CvReport rotated = cross_validate(d, ModelKind::Gpr, 5, 42, quick_opts());

    REQUIRE(base.per_sample.size() == rotated.per_sample.size());
    CHECK(base.mape_percent == rotated.mape_percent);
    for (std::size_t i = 0; i < base.per_sample.size(); ++i) {
        CHECK(base.per_sample[i].sample_id == rotated.per_sample[i].sample_id);
        CHECK(base.per_sample[i].e_est == rotated.per_sample[i].e_est);
        CHECK(base.per_sample[i].fold == rotated.per_sample[i].fold);
    }
}

TEST_CASE("parallel and serial fold execution agree") {
    const Dataset d = small_corpus(4, 0.05);
    const CvReport par = cross_validate(d, ModelKind::Gpr, 5, 11, quick_opts(), true);
    const CvReport ser = cross_validate(d, ModelKind::Gpr, 5, 11, quick_opts(), false);
    REQUIRE(par.per_sample.size() == ser.per_sample.size());
    CHECK(par.mape_percent == ser.mape_percent);
    for (std::size_t i = 0; i < par.per_sample.size(); ++i)
        CHECK(par.per_sample[i].e_est == ser.per_sample[i].e_est);
}

TEST_CASE("compare_models uses identical folds and prefers the truth") {
    // On a purely linear corpus LR is the true model class.
    const Dataset d = linear_corpus(40);
    const ModelComparison cmp = compare_models(d, 5, 21, quick_opts());
    CHECK(cmp.lr_mape <= cmp.gpr_mape + 1.0); // within one percentage point
}

TEST_CASE("ablating an already-constant column is a no-op") {
    // qp is constant in this corpus, so pinning it must not change anything
    // beyond fit determinism noise.
    Dataset d = linear_corpus(40);
    const double baseline =
        cross_validate(d, ModelKind::Gpr, 5, 13, quick_opts()).mape_percent;
    const double ablated = ablate(d, FeatureGroup::Qp, 5, 13, quick_opts());
    CHECK(std::fabs(baseline - ablated) <= 1e-6);
}

TEST_CASE("ablating the dominant feature hurts more than an inert one") {
    // Energy scales with pixels * frames; qp has no effect at slope 0.
    const Dataset d = small_corpus(9, 0.02);
    const double pixels_mape = ablate(d, FeatureGroup::Pixels, 5, 42, quick_opts());
    const double qp_mape = ablate(d, FeatureGroup::Qp, 5, 42, quick_opts());
    CHECK(pixels_mape > qp_mape);
}

TEST_CASE("run_ablation covers the five scenarios in order") {
    const Dataset d = small_corpus(10, 0.05);
    const AblationReport report = run_ablation(d, 5, 42, quick_opts());
    REQUIRE(report.rows.size() == 5);
    CHECK(report.rows[0].scenario == "a");
    CHECK(report.rows[0].group == FeatureGroup::Pixels);
    CHECK(report.rows[1].group == FeatureGroup::Preset);
    CHECK(report.rows[2].group == FeatureGroup::Frames);
    CHECK(report.rows[3].group == FeatureGroup::Standard);
    CHECK(report.rows[4].scenario == "e");
    CHECK(report.rows[4].group == FeatureGroup::Qp);
}

TEST_CASE("group labels follow the plotting conventions") {
    EncodingConfig landscape;
    landscape.sequence_id = "l";
    landscape.width = 1920;
    landscape.height = 1080;
    landscape.frames = 100;
    landscape.standard = Standard::H265;
    landscape.preset = Preset::Slow;
    landscape.qp = 27;
    CHECK(group_label(landscape, Grouping::Resolution) == "1080");
    CHECK(group_label(landscape, Grouping::Standard) == "H265");
    CHECK(group_label(landscape, Grouping::Preset) == "slow");
    CHECK(group_label(landscape, Grouping::Qp) == "27");

    EncodingConfig portrait = landscape;
    portrait.width = 1080;
    portrait.height = 1920;
    CHECK(group_label(portrait, Grouping::Resolution) == "1080");

    EncodingConfig av1 = landscape;
    av1.standard = Standard::AV1;
    av1.qp = 132;
    CHECK(group_label(av1, Grouping::Qp) == "33");
    av1.qp = 110;
    CHECK(group_label(av1, Grouping::Qp) == "27.5");
}

TEST_CASE("export_scatter writes labels and validates ids") {
    const Dataset d = small_corpus(12, 0.05);
    const CvReport report = cross_validate(d, ModelKind::Lr, 5, 42);
    const auto path = temp_file("scatter.csv");
    export_scatter(report, d, Grouping::Resolution, path);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "sample_id,group_label,e_true,e_est");
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == static_cast<int>(d.size()));

    CvReport bogus = report;
    bogus.per_sample[0].sample_id = "nope|H264|slow|qp1|f1";
    CHECK_THROWS_WITH_AS(export_scatter(bogus, d, Grouping::Standard, path),
                         doctest::Contains("UnknownSampleId"), Error);
}

TEST_CASE("report CSV round-trips") {
    const Dataset d = linear_corpus(20);
    const CvReport report = cross_validate(d, ModelKind::Lr, 4, 9);
    const auto path = temp_file("report.csv");
    save_report_csv(report, path);
    const CvReport loaded = load_report_csv(path);
    REQUIRE(loaded.per_sample.size() == report.per_sample.size());
    CHECK(loaded.mape_percent == doctest::Approx(report.mape_percent).epsilon(1e-12));
    for (std::size_t i = 0; i < report.per_sample.size(); ++i) {
        CHECK(loaded.per_sample[i].sample_id == report.per_sample[i].sample_id);
        CHECK(loaded.per_sample[i].e_true == report.per_sample[i].e_true); // bit-exact
        CHECK(loaded.per_sample[i].e_est == report.per_sample[i].e_est);
        CHECK(loaded.per_sample[i].fold == report.per_sample[i].fold);
    }
}
