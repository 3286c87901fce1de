// cograd: cognitive-radar simulation experiments from a JSON scenario file.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cograd/errors.hpp"
#include "cograd/harness.hpp"

namespace {

using cograd::harness::RunReport;
using cograd::harness::ScenarioConfig;

int cmd_run(const std::string& config_path, const std::string& experiment,
            long seed, long trials, const std::string& out_dir) {
    ScenarioConfig cfg = ScenarioConfig::from_file(config_path);
    if (!experiment.empty()) {
        nlohmann::json patch = cfg.raw;
        patch["experiment"] = experiment;
        cfg = ScenarioConfig::from_json(patch);
    }
    if (seed >= 0 || trials >= 0) {
        nlohmann::json patch = cfg.raw;
        if (seed >= 0) patch["seed"] = seed;
        if (trials >= 0) patch["trials"] = trials;
        cfg = ScenarioConfig::from_json(patch);
    }
    const RunReport report = cograd::harness::run_experiment(cfg);
    const auto paths = cograd::harness::write_report(report, out_dir);
    for (const auto& p : paths) std::printf("wrote %s\n", p.c_str());
    std::printf("experiment=%s seed=%llu trials=%d elapsed_s=%.3f\n",
                report.experiment.c_str(),
                static_cast<unsigned long long>(report.seed), report.trials,
                report.elapsed_s);
    return 0;
}

int cmd_validate(const std::string& config_path) {
    const ScenarioConfig cfg = ScenarioConfig::from_file(config_path);
    std::printf("ok: experiment=%s trials=%d seed=%llu\n", cfg.experiment.c_str(),
                cfg.trials, static_cast<unsigned long long>(cfg.seed));
    return 0;
}

int cmd_lambda_sweep(const std::string& config_path, double from, double to,
                     long steps, const std::string& out_dir) {
    if (steps < 2) throw cograd::ConfigError("--steps must be >= 2");
    if (!(from <= to)) throw cograd::ConfigError("--from must be <= --to");
    ScenarioConfig cfg = ScenarioConfig::from_file(config_path);
    nlohmann::json patch = cfg.raw;
    patch["experiment"] = "spectrum";
    std::vector<double> grid;
    for (long i = 0; i < steps; ++i)
        grid.push_back(from + (to - from) * static_cast<double>(i) /
                                  static_cast<double>(steps - 1));
    patch["spectrum"]["lambda_grid"] = grid;
    cfg = ScenarioConfig::from_json(patch);
    const RunReport report = cograd::harness::run_spectrum_experiment(cfg);
    const auto paths = cograd::harness::write_report(report, out_dir);
    for (const auto& p : paths) std::printf("wrote %s\n", p.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cognitive-radar simulation experiments"};
    app.require_subcommand(1);

    std::string config_path, experiment, out_dir = ".";
    long seed = -1, trials = -1;
    double from = 0.0, to = 1.0;
    long steps = 11;

    auto* run = app.add_subcommand("run", "run an experiment and write CSV + report");
    run->add_option("config", config_path, "scenario JSON file")->required();
    run->add_option("--experiment", experiment, "override the experiment name");
    run->add_option("--seed", seed, "override the base seed");
    run->add_option("--trials", trials, "override the Monte Carlo trial count");
    run->add_option("--out", out_dir, "output directory (default: .)");

    auto* validate = app.add_subcommand("validate", "parse and validate a config");
    validate->add_option("config", config_path, "scenario JSON file")->required();

    auto* sweep = app.add_subcommand(
        "lambda-sweep", "spectrum experiment over an evenly spaced lambda grid");
    sweep->add_option("config", config_path, "scenario JSON file")->required();
    sweep->add_option("--from", from, "first lambda")->required();
    sweep->add_option("--to", to, "last lambda")->required();
    sweep->add_option("--steps", steps, "number of grid points")->required();
    sweep->add_option("--out", out_dir, "output directory (default: .)");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return cmd_run(config_path, experiment, seed, trials, out_dir);
        if (validate->parsed()) return cmd_validate(config_path);
        if (sweep->parsed()) return cmd_lambda_sweep(config_path, from, to, steps, out_dir);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const cograd::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const cograd::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
