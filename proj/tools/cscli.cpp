// Command-line experiment runner: frame certification, recovery Monte Carlo,
// StRIP / cross-term / l2-l2 experiments, and a complexity bench. All
// randomness flows from --seed; identical config + seed reproduces the CSV
// byte for byte (timings live in the JSON summary only).
#include <chrono>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chirpcs/analysis.hpp"
#include "chirpcs/decoder.hpp"
#include "chirpcs/records.hpp"

using namespace chirpcs;

namespace {

using clock_type = std::chrono::steady_clock;

struct CliConfig {
    int m = 3;
    int r = 0;
    int k = 2;
    double epsilon = 0.5;
    double delta = 0.01;
    double sigma_data = 0.0;
    double sigma_meas = 0.0;
    double amplitude_decay = 1.0;
    double min_rate = 0.0;
    int trials = 100;
    int jobs = 1;
    int max_retries = 24;
    bool no_projection = false;
    std::uint64_t seed = 1;
    std::string out = "cscli_out";
    std::string coeff_model = "unit";
};

nlohmann::json config_echo(const CliConfig& c, const std::string& command) {
    return {{"command", command},
            {"m", c.m},
            {"r", c.r},
            {"k", c.k},
            {"epsilon", c.epsilon},
            {"delta", c.delta},
            {"sigma_data", c.sigma_data},
            {"sigma_meas", c.sigma_meas},
            {"amplitude_decay", c.amplitude_decay},
            {"min_rate", c.min_rate},
            {"trials", c.trials},
            {"jobs", c.jobs},
            {"max_retries", c.max_retries},
            {"kerdock_projection", !c.no_projection},
            {"seed", c.seed},
            {"out", c.out},
            {"coeff_model", c.coeff_model}};
}

void apply_config_file(CliConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot read config file: " + path);
    nlohmann::json j;
    f >> j;
    if (j.contains("m")) cfg.m = j["m"];
    if (j.contains("r")) cfg.r = j["r"];
    if (j.contains("k")) cfg.k = j["k"];
    if (j.contains("epsilon")) cfg.epsilon = j["epsilon"];
    if (j.contains("delta")) cfg.delta = j["delta"];
    if (j.contains("sigma_data")) cfg.sigma_data = j["sigma_data"];
    if (j.contains("sigma_meas")) cfg.sigma_meas = j["sigma_meas"];
    if (j.contains("amplitude_decay")) cfg.amplitude_decay = j["amplitude_decay"];
    if (j.contains("min_rate")) cfg.min_rate = j["min_rate"];
    if (j.contains("trials")) cfg.trials = j["trials"];
    if (j.contains("jobs")) cfg.jobs = j["jobs"];
    if (j.contains("max_retries")) cfg.max_retries = j["max_retries"];
    if (j.contains("kerdock_projection")) cfg.no_projection = !j["kerdock_projection"].get<bool>();
    if (j.contains("seed")) cfg.seed = j["seed"];
    if (j.contains("out")) cfg.out = j["out"];
    if (j.contains("coeff_model")) cfg.coeff_model = j["coeff_model"];
}

RecoveryOptions options_from(const CliConfig& cfg) {
    RecoveryOptions opts;
    opts.max_retries = cfg.max_retries;
    opts.kerdock_projection = !cfg.no_projection;
    return opts;
}

void emit(const CliConfig& cfg, const std::string& command,
          const std::vector<ExperimentRecord>& records, nlohmann::json metrics, bool pass,
          double elapsed_ms) {
    write_csv_file(cfg.out + ".csv", records);
    nlohmann::json summary{{"config", config_echo(cfg, command)},
                           {"metrics", std::move(metrics)},
                           {"pass", pass},
                           {"elapsed_ms", elapsed_ms}};
    write_json_file(cfg.out + ".json", summary);
    std::printf("%s: %s (results: %s.csv, %s.json)\n", command.c_str(),
                pass ? "pass" : "BOUND VIOLATION", cfg.out.c_str(), cfg.out.c_str());
}

int run_verify(const CliConfig& cfg) {
    const auto t0 = clock_type::now();
    const SuiteReport rep = verify_suite(cfg.m, cfg.r);
    std::vector<ExperimentRecord> records;
    std::uint64_t id = 0;
    for (const auto& check : rep.checks)
        records.push_back({id++, cfg.m, cfg.r, cfg.k, cfg.seed, check.check_name,
                           static_cast<double>(check.violations), 0.0, check.pass});
    const double ms = std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
    emit(cfg, "verify", records, to_json(rep), rep.pass, ms);
    for (const auto& check : rep.checks)
        std::printf("  %-24s %s (%llu checked, %llu violations, %.1f ms)\n",
                    check.check_name.c_str(), check.pass ? "pass" : "FAIL",
                    static_cast<unsigned long long>(check.pairs_checked),
                    static_cast<unsigned long long>(check.violations), check.elapsed_ms);
    return rep.pass ? 0 : 1;
}

int run_recover(const CliConfig& cfg) {
    const auto t0 = clock_type::now();
    const DGFrame frame{FrameParams(cfg.m, cfg.r)};
    const auto res = recovery_experiment(frame, cfg.k, cfg.trials, cfg.seed, cfg.sigma_meas,
                                         cfg.amplitude_decay, options_from(cfg), cfg.jobs);
    const bool pass = res.budget_respected && res.support_rate >= cfg.min_rate;
    nlohmann::json metrics{{"support_rate", res.support_rate},
                           {"mean_coeff_error", res.mean_coeff_error},
                           {"max_coeff_error", res.max_coeff_error},
                           {"max_columns_evaluated", res.max_columns_evaluated},
                           {"column_budget", res.column_budget},
                           {"mean_recover_ms", res.mean_recover_ms},
                           {"median_recover_ms", res.median_recover_ms}};
    const double ms = std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
    emit(cfg, "recover", res.records, metrics, pass, ms);
    return pass ? 0 : 1;
}

int run_strip(const CliConfig& cfg) {
    const auto t0 = clock_type::now();
    const DGFrame frame{FrameParams(cfg.m, cfg.r)};
    StripParams sp;
    sp.k = cfg.k;
    sp.epsilon = cfg.epsilon;
    sp.trials = cfg.trials;
    sp.model = cfg.coeff_model == "gauss" ? CoefficientModel::kRealGaussian
                                          : CoefficientModel::kUnitModulusRandomPhase;
    const StripResult res = strip_montecarlo(frame, sp, cfg.seed, cfg.jobs);
    nlohmann::json metrics{{"violation_rate", res.violation_rate},
                           {"delta_bound", res.delta_bound},
                           {"mean_ratio", res.mean_ratio},
                           {"within_bound", res.within_bound}};
    const double ms = std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
    emit(cfg, "strip", res.records, metrics, res.within_bound, ms);
    return res.within_bound ? 0 : 1;
}

int run_crossterm(const CliConfig& cfg) {
    const auto t0 = clock_type::now();
    const DGFrame frame{FrameParams(cfg.m, cfg.r)};
    const auto res = gamma_experiment(frame, cfg.k, cfg.delta, cfg.trials, cfg.seed, cfg.jobs);
    nlohmann::json metrics{{"exceed_rate_r", res.exceed_rate_r},
                           {"exceed_rate_eta", res.exceed_rate_eta},
                           {"max_gamma", res.max_gamma},
                           {"within_bound", res.within_bound}};
    const double ms = std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
    emit(cfg, "crossterm", res.records, metrics, res.within_bound, ms);
    return res.within_bound ? 0 : 1;
}

int run_l2l2(const CliConfig& cfg) {
    const auto t0 = clock_type::now();
    const DGFrame frame{FrameParams(cfg.m, cfg.r)};
    const NoiseModel noise{cfg.sigma_data, cfg.sigma_meas};
    const auto res = l2l2_experiment(frame, cfg.k, noise, cfg.epsilon, cfg.trials, cfg.seed,
                                     options_from(cfg), cfg.jobs);
    const double min_rate = cfg.min_rate > 0.0 ? cfg.min_rate : 0.95;
    const bool pass = res.bound_rate >= min_rate;
    nlohmann::json metrics{{"bound_rate", res.bound_rate},
                           {"folding_rate", res.folding_rate},
                           {"support_rate", res.support_rate},
                           {"mean_error", res.mean_error},
                           {"materialized_data_noise", res.materialized}};
    const double ms = std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
    emit(cfg, "l2l2", res.records, metrics, pass, ms);
    return pass ? 0 : 1;
}

int run_bench(const CliConfig& cfg) {
    const auto t0 = clock_type::now();
    std::vector<ExperimentRecord> records;
    nlohmann::json table = nlohmann::json::array();

    auto run_one = [&](int m, int r, int k) {
        const DGFrame frame{FrameParams(m, r)};
        auto res = recovery_experiment(frame, k, cfg.trials, cfg.seed, 0.0, cfg.amplitude_decay,
                                       options_from(cfg), 1);
        for (auto rec : res.records)
            if (rec.metric_name == "columns_evaluated" || rec.metric_name == "support_recovered")
                records.push_back(rec);
        table.push_back({{"m", m},
                         {"r", r},
                         {"k", k},
                         {"median_recover_ms", res.median_recover_ms},
                         {"mean_recover_ms", res.mean_recover_ms},
                         {"per_iteration_ms", res.median_recover_ms / std::max(1, k)},
                         {"max_columns_evaluated", res.max_columns_evaluated},
                         {"column_budget", res.column_budget},
                         {"support_rate", res.support_rate}});
        return res;
    };

    // m sweep at fixed k, r = 0
    const auto bench_m9 = run_one(9, 0, cfg.k);
    const auto bench_m11 = run_one(11, 0, cfg.k);
    // r sweep at fixed m
    const int fixed_m = cfg.m >= 9 ? cfg.m : 9;
    const auto bench_r0 = run_one(fixed_m, 0, cfg.k);
    const auto bench_r1 = run_one(fixed_m, 1, cfg.k);
    const auto bench_r2 = run_one(fixed_m, 2, cfg.k);
    // k sweep at fixed m
    const auto bench_k1 = run_one(fixed_m, 0, 1);
    const auto bench_k4 = run_one(fixed_m, 0, 4);

    const double ratio_r = bench_r2.median_recover_ms / bench_r0.median_recover_ms;
    const bool r_independent = ratio_r >= 0.5 && ratio_r <= 2.0;

    // N log^2 N model: 2048*121 / (512*81) ~ 5.98, allow 1.3x
    const double ratio_m = bench_m11.median_recover_ms / bench_m9.median_recover_ms;
    const bool m_scaling = ratio_m <= 1.3 * (2048.0 * 121.0) / (512.0 * 81.0);

    const double ratio_k = bench_k4.median_recover_ms / bench_k1.median_recover_ms;
    const bool k_scaling = ratio_k >= 2.0 && ratio_k <= 8.0;

    const bool budgets = bench_r0.budget_respected && bench_r1.budget_respected &&
                         bench_r2.budget_respected && bench_m9.budget_respected &&
                         bench_m11.budget_respected;

    const bool pass = r_independent && m_scaling && k_scaling && budgets;
    nlohmann::json metrics{{"table", table},
                           {"ratio_r2_over_r0", ratio_r},
                           {"r_independent", r_independent},
                           {"ratio_m11_over_m9", ratio_m},
                           {"m_scaling_ok", m_scaling},
                           {"ratio_k4_over_k1", ratio_k},
                           {"k_scaling_ok", k_scaling},
                           {"budgets_respected", budgets}};
    const double ms = std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
    emit(cfg, "bench", records, metrics, pass, ms);
    return pass ? 0 : 1;
}

void add_common_options(CLI::App* sub, CliConfig& cfg) {
    sub->add_option("--m", cfg.m, "frame dimension exponent, odd, 3..25")->capture_default_str();
    sub->add_option("--r", cfg.r, "Delsarte-Goethals layer, 0..(m-1)/2")->capture_default_str();
    sub->add_option("--k", cfg.k, "sparsity")->capture_default_str();
    sub->add_option("--epsilon", cfg.epsilon, "isometry slack")->capture_default_str();
    sub->add_option("--delta", cfg.delta, "failure probability budget")->capture_default_str();
    sub->add_option("--sigma-data", cfg.sigma_data, "data-domain noise std-dev")
        ->capture_default_str();
    sub->add_option("--sigma-meas", cfg.sigma_meas, "measurement noise std-dev")
        ->capture_default_str();
    sub->add_option("--amplitude-decay", cfg.amplitude_decay,
                    "geometric decay of planted coefficient magnitudes")
        ->capture_default_str();
    sub->add_option("--min-rate", cfg.min_rate, "asserted minimum success rate")
        ->capture_default_str();
    sub->add_option("--trials", cfg.trials, "Monte Carlo trials")->capture_default_str();
    sub->add_option("--jobs", cfg.jobs, "worker threads (output is order-independent)")
        ->capture_default_str();
    sub->add_option("--max-retries", cfg.max_retries, "row-decode retry batches")
        ->capture_default_str();
    sub->add_flag("--no-projection", cfg.no_projection,
                  "disable the Kerdock rank-distance projection");
    sub->add_option("--seed", cfg.seed, "PRNG seed; sole source of randomness")
        ->capture_default_str();
    sub->add_option("--out", cfg.out, "output path stem (<out>.csv, <out>.json)")
        ->capture_default_str();
    sub->add_option("--coeff-model", cfg.coeff_model, "unit | gauss")->capture_default_str();
    std::string ignored;
    sub->add_option("--config", ignored, "JSON file with option defaults (flags override)");
}

}  // namespace

int main(int argc, char** argv) {
    CliConfig cfg;

    // The config file seeds the defaults, so it must load before parsing.
    try {
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            if (arg == "--config" && i + 1 < argc)
                apply_config_file(cfg, argv[i + 1]);
            else if (arg.rfind("--config=", 0) == 0)
                apply_config_file(cfg, arg.substr(9));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    CLI::App app{"Delsarte-Goethals chirp sensing experiment runner"};
    app.require_subcommand(1);
    CLI::App* verify = app.add_subcommand("verify", "machine-check the frame certificates");
    CLI::App* recover = app.add_subcommand("recover", "plant-and-recover Monte Carlo");
    CLI::App* strip = app.add_subcommand("strip", "statistical isometry experiment");
    CLI::App* crossterm = app.add_subcommand("crossterm", "cross-term concentration experiment");
    CLI::App* l2l2 = app.add_subcommand("l2l2", "noisy end-to-end l2/l2 bound experiment");
    CLI::App* bench = app.add_subcommand("bench", "recovery timing and complexity witnesses");
    for (CLI::App* sub : {verify, recover, strip, crossterm, l2l2, bench})
        add_common_options(sub, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) return run_verify(cfg);
        if (recover->parsed()) return run_recover(cfg);
        if (strip->parsed()) return run_strip(cfg);
        if (crossterm->parsed()) return run_crossterm(cfg);
        if (l2l2->parsed()) return run_l2l2(cfg);
        if (bench->parsed()) return run_bench(cfg);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
