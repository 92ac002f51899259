// Command-line front end: generate synthetic corpora, run the measurement
// loop against a probe, fit/predict energy models, and run the evaluation
// studies (cross-validation, ablation, model comparison, scatter export).

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "encergy/corpus.hpp"
#include "encergy/error.hpp"
#include "encergy/evaluation.hpp"
#include "encergy/features.hpp"
#include "encergy/format.hpp"
#include "encergy/gpr.hpp"
#include "encergy/linreg.hpp"
#include "encergy/measurement.hpp"
#include "encergy/model_io.hpp"
#include "encergy/rng.hpp"

namespace {

using namespace encergy;

int exit_code_for(const Error& e) {
    if (e.kind() == "ProbeExhausted") return 3;
    if (e.kind() == "NotPositiveDefinite" || e.kind() == "OptimizationDiverged") return 4;
    return 2;
}

struct GlobalFlags {
    std::uint64_t seed = 42;
    bool quiet = false;
};

void info(const GlobalFlags& g, const std::string& line) {
    if (!g.quiet) std::cout << line << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct FitFlags {
    int restarts = 5;
    int max_iterations = 200;
    double tol = 1e-6;
    std::optional<double> fixed_sigma_n2;

    FitOptions resolve(std::uint64_t seed) const {
        FitOptions opts;
        opts.restarts = restarts;
        opts.max_iterations = max_iterations;
        opts.convergence_tol = tol;
        opts.seed = seed;
        opts.fixed_sigma_n2 = fixed_sigma_n2;
        return opts;
    }
};

void add_fit_flags(CLI::App* cmd, FitFlags& flags) {
    cmd->add_option("--restarts", flags.restarts, "Optimizer restarts (default 5)");
    cmd->add_option("--max-iterations", flags.max_iterations,
                    "Optimizer iterations per restart (default 200)");
    cmd->add_option("--tol", flags.tol, "Relative likelihood convergence tolerance");
    cmd->add_option("--fixed-sigma-n2", flags.fixed_sigma_n2,
                    "Pin the noise variance instead of optimizing it");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hardware video encoder energy model toolkit"};
    app.require_subcommand(1);

    GlobalFlags global;
    app.add_option("--seed", global.seed, "Global RNG seed (default 42)");
    app.add_flag("--quiet", global.quiet, "Suppress informational output");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset CSV");
    std::string gen_spec_path, gen_params_path, gen_out = "dataset.csv";
    gen->add_option("--spec", gen_spec_path, "Corpus spec JSON (defaults when omitted)");
    gen->add_option("--params", gen_params_path, "Oracle params JSON (defaults when omitted)");
    gen->add_option("--out", gen_out, "Output dataset CSV")->required();

    // measure
    auto* measure = app.add_subcommand("measure", "Run the confidence-interval measurement loop");
    std::string measure_probe_dir, measure_out = "measurements.csv";
    std::optional<double> synth_mu;
    double synth_sigma_rel = 0.0;
    int measure_jobs = 1;
    CitConfig cit;
    std::string quantile_convention = "two-sided";
    measure->add_option("--probe-dir", measure_probe_dir,
                        "Directory of per-job trace directories (dyn_<k>.csv/stat_<k>.csv)");
    measure->add_option("--synthetic-mu", synth_mu, "Synthetic probe true mean energy (J)");
    measure->add_option("--synthetic-sigma-rel", synth_sigma_rel,
                        "Synthetic probe relative noise");
    measure->add_option("--jobs", measure_jobs, "Synthetic job count (default 1)");
    measure->add_option("--alpha", cit.alpha, "Confidence level (default 0.99)");
    measure->add_option("--beta", cit.beta, "Relative tolerance (default 0.02)");
    measure->add_option("--m-min", cit.m_min, "Minimum measurements (default 2)");
    measure->add_option("--m-max", cit.m_max, "Measurement cap (default 200)");
    measure->add_option("--quantile-convention", quantile_convention,
                        "two-sided (default) or one-sided");
    measure->add_option("--out", measure_out, "Output measurement CSV")->required();

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Train a model on a dataset CSV");
    std::string fit_data, fit_out = "model.json", fit_kind = "gpr";
    FitFlags fit_flags;
    fit_cmd->add_option("--data", fit_data, "Dataset CSV")->required();
    fit_cmd->add_option("--model-kind", fit_kind, "gpr (default) or lr");
    fit_cmd->add_option("--out", fit_out, "Output model JSON")->required();
    add_fit_flags(fit_cmd, fit_flags);

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "Predict the energy of one encode config");
    std::string predict_model, predict_standard = "H264", predict_preset = "ultrafast";
    int p_width = 0, p_height = 0, p_frames = 0, p_qp = 0;
    predict_cmd->add_option("--model", predict_model, "Model JSON")->required();
    predict_cmd->add_option("--width", p_width, "Width in pixels")->required();
    predict_cmd->add_option("--height", p_height, "Height in pixels")->required();
    predict_cmd->add_option("--frames", p_frames, "Frame count")->required();
    predict_cmd->add_option("--standard", predict_standard, "H264|H265|AV1")->required();
    predict_cmd->add_option("--preset", predict_preset, "ultrafast|slow")->required();
    predict_cmd->add_option("--qp", p_qp, "Quantization parameter")->required();

    // cv
    auto* cv_cmd = app.add_subcommand("cv", "K-fold cross-validated MAPE");
    std::string cv_data, cv_kind = "gpr", cv_out, cv_json_out;
    int cv_k = 10;
    bool cv_serial = false;
    FitFlags cv_flags;
    cv_cmd->add_option("--data", cv_data, "Dataset CSV")->required();
    cv_cmd->add_option("--model-kind", cv_kind, "gpr (default) or lr");
    cv_cmd->add_option("--k", cv_k, "Fold count (default 10)");
    cv_cmd->add_option("--out", cv_out, "Per-sample report CSV");
    cv_cmd->add_option("--json-out", cv_json_out, "Per-sample report JSON");
    cv_cmd->add_flag("--serial", cv_serial, "Run folds serially");
    add_fit_flags(cv_cmd, cv_flags);

    // ablate
    auto* ablate_cmd = app.add_subcommand("ablate", "Feature ablation study (GPR)");
    std::string ablate_data, ablate_out;
    int ablate_k = 10;
    bool ablate_serial = false;
    FitFlags ablate_flags;
    ablate_cmd->add_option("--data", ablate_data, "Dataset CSV")->required();
    ablate_cmd->add_option("--k", ablate_k, "Fold count (default 10)");
    ablate_cmd->add_option("--out", ablate_out, "Ablation report CSV");
    ablate_cmd->add_flag("--serial", ablate_serial, "Run folds serially");
    add_fit_flags(ablate_cmd, ablate_flags);

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "GPR vs LR on identical folds");
    std::string compare_data;
    int compare_k = 10;
    bool compare_serial = false;
    FitFlags compare_flags;
    compare_cmd->add_option("--data", compare_data, "Dataset CSV")->required();
    compare_cmd->add_option("--k", compare_k, "Fold count (default 10)");
    compare_cmd->add_flag("--serial", compare_serial, "Run folds serially");
    add_fit_flags(compare_cmd, compare_flags);

    // export
    auto* export_cmd = app.add_subcommand("export", "Scatter CSV for plotting");
    std::string export_report, export_data, export_grouping = "standard",
                export_out = "scatter.csv";
    export_cmd->add_option("--report", export_report, "Per-sample report CSV from cv")->required();
    export_cmd->add_option("--data", export_data, "Dataset CSV")->required();
    export_cmd->add_option("--grouping", export_grouping, "standard|resolution|preset|qp");
    export_cmd->add_option("--out", export_out, "Output scatter CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            CorpusSpec spec = gen_spec_path.empty() ? default_corpus_spec()
                                                    : load_corpus_spec(gen_spec_path);
            OracleParams params = gen_params_path.empty() ? default_oracle_params()
                                                          : load_oracle_params(gen_params_path);
            if (gen->count("--spec") == 0) spec.seed = global.seed;
            if (gen->count("--params") == 0) params.seed = global.seed;
            const Dataset dataset = generate_corpus(spec, params);
            save_dataset(dataset, gen_out);
            info(global, "seed: " + std::to_string(spec.seed));
            std::cout << "samples: " << dataset.size() << '\n';
            info(global, "wrote " + gen_out);
        } else if (measure->parsed()) {
            cit.quantile_convention = quantile_convention == "one-sided"
                                          ? QuantileConvention::OneSided
                                          : QuantileConvention::TwoSided;
            if (quantile_convention != "one-sided" && quantile_convention != "two-sided")
                fail("ParseError", "unknown quantile convention '" + quantile_convention + "'");
            validate_cit_config(cit);

            struct Job {
                std::string id;
                std::unique_ptr<EnergyProbe> probe;
            };
            std::vector<Job> jobs;
            if (!measure_probe_dir.empty()) {
                std::vector<std::filesystem::path> dirs;
                for (const auto& entry : std::filesystem::directory_iterator(measure_probe_dir))
                    if (entry.is_directory()) dirs.push_back(entry.path());
                std::sort(dirs.begin(), dirs.end());
                for (const auto& dir : dirs)
                    jobs.push_back({dir.filename().string(),
                                    std::make_unique<TraceReplayProbe>(dir)});
                if (jobs.empty())
                    fail("ParseError", "no job directories under " + measure_probe_dir);
            } else if (synth_mu) {
                for (int i = 0; i < measure_jobs; ++i)
                    jobs.push_back({"synthetic_" + std::to_string(i),
                                    std::make_unique<SyntheticProbe>(
                                        *synth_mu, synth_sigma_rel,
                                        mix_seed({global.seed, static_cast<std::uint64_t>(i)}))});
            } else {
                fail("ParseError", "measure needs --probe-dir or --synthetic-mu");
            }

            std::ofstream out(measure_out);
            if (!out) fail("ParseError", "cannot write " + measure_out);
            out << "sequence_id,mean_energy_j,m,converged,final_halfwidth\n";
            for (auto& job : jobs) {
                const MeasurementResult r = measure_until_confident(*job.probe, cit);
                out << job.id << ',' << format_full(r.mean_energy_j) << ',' << r.m << ','
                    << (r.converged ? "true" : "false") << ',' << format_full(r.final_halfwidth)
                    << '\n';
                info(global, job.id + ": mean " + format_sig6(r.mean_energy_j) + " J, m=" +
                                 std::to_string(r.m) + (r.converged ? "" : " (not converged)"));
            }
            if (!out.flush()) fail("ParseError", "failed writing " + measure_out);
            info(global, "wrote " + measure_out);
        } else if (fit_cmd->parsed()) {
            const Dataset dataset = load_dataset(fit_data);
            const ModelKind kind = parse_model_kind(fit_kind);
            const auto start = std::chrono::steady_clock::now();
            if (kind == ModelKind::Gpr) {
                const GprModel model = fit(dataset, fit_flags.resolve(global.seed));
                save_model(model, fit_out);
            } else {
                const LrModel model = fit_ols(dataset);
                save_model(model, fit_out);
            }
            info(global, "seed: " + std::to_string(global.seed));
            std::cout << "model_kind: " << fit_kind << '\n';
            std::cout << "training time: " << format_sig6(seconds_since(start)) << " s\n";
            info(global, "wrote " + fit_out);
        } else if (predict_cmd->parsed()) {
            EncodingConfig config;
            config.sequence_id = "cli";
            config.width = p_width;
            config.height = p_height;
            config.frames = p_frames;
            config.standard = parse_standard(predict_standard);
            config.preset = parse_preset(predict_preset);
            config.qp = p_qp;
            validate_config(config);
            const auto model = load_any_model(predict_model);
            const auto start = std::chrono::steady_clock::now();
            const double energy = std::visit(
                [&](const auto& m) {
                    if constexpr (std::is_same_v<std::decay_t<decltype(m)>, GprModel>)
                        return predict(m, config);
                    else
                        return predict_lr(m, config);
                },
                model);
            const double ms = seconds_since(start) * 1e3;
            std::cout << "energy_j: " << format_sig6(energy) << '\n';
            std::cout << "prediction time: " << format_sig6(ms) << " ms\n";
        } else if (cv_cmd->parsed()) {
            const Dataset dataset = load_dataset(cv_data);
            const CvReport report =
                cross_validate(dataset, parse_model_kind(cv_kind), cv_k, global.seed,
                               cv_flags.resolve(global.seed), !cv_serial);
            if (!cv_out.empty()) save_report_csv(report, cv_out);
            if (!cv_json_out.empty()) save_report_json(report, cv_json_out);
            info(global, "seed: " + std::to_string(global.seed));
            std::cout << "MAPE: " << format_sig6(report.mape_percent) << "%\n";
        } else if (ablate_cmd->parsed()) {
            const Dataset dataset = load_dataset(ablate_data);
            const AblationReport report = run_ablation(dataset, ablate_k, global.seed,
                                                       ablate_flags.resolve(global.seed),
                                                       !ablate_serial);
            if (!ablate_out.empty()) save_ablation_csv(report, ablate_out);
            info(global, "seed: " + std::to_string(global.seed));
            std::cout << "scenario,feature,mape\n";
            for (const AblationRow& row : report.rows)
                std::cout << row.scenario << ',' << feature_group_name(row.group) << ','
                          << format_sig6(row.mape_percent) << '\n';
        } else if (compare_cmd->parsed()) {
            const Dataset dataset = load_dataset(compare_data);
            const ModelComparison cmp =
                compare_models(dataset, compare_k, global.seed,
                               compare_flags.resolve(global.seed), !compare_serial);
            info(global, "seed: " + std::to_string(global.seed));
            std::cout << "gpr MAPE: " << format_sig6(cmp.gpr_mape) << "%\n";
            std::cout << "lr MAPE: " << format_sig6(cmp.lr_mape) << "%\n";
        } else if (export_cmd->parsed()) {
            const CvReport report = load_report_csv(export_report);
            const Dataset dataset = load_dataset(export_data);
            export_scatter(report, dataset, parse_grouping(export_grouping), export_out);
            info(global, "wrote " + export_out);
        }
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "InternalError: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
