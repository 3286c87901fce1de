#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cograd/controller.hpp"
#include "cograd/errors.hpp"
#include "cograd/sensing.hpp"
#include "cograd/spectrum_hmm.hpp"
#include "cograd/symbiotic.hpp"

namespace cograd::harness {

/// Fully-resolved scenario configuration. Parsed from a single JSON file
/// with one section per experiment; unknown keys are rejected.
struct ScenarioConfig {
    std::string experiment;  // spectrum | tracking | passive_selection | symbiotic
    int trials = 1;
    std::uint64_t seed = 0;
    nlohmann::json raw;  // resolved config (defaults filled in)

    struct Spectrum {
        Eigen::Matrix2d a_true;
        Eigen::Vector2d pi_true;
        int detector_n_samples = 16;
        double detector_noise_power = 1.0;
        double detector_pfa = 0.1;
        double busy_snr_db = 0.0;
        double lambda = 0.65;
        std::vector<double> lambda_grid;
        long pris = 10000;
        int window = 200;
        int max_iters = 20;
        double tol = 1e-6;
        long warmup_pris = 1000;   // excluded from the time-series stability window
        long block_pris = 500;     // time-series aggregation block
    } spectrum;

    controller::TrackScenario tracking;

    struct PassiveSelection {
        tracking::State initial_state = tracking::State::Zero();
        Eigen::Matrix4d prior_cov = Eigen::Matrix4d::Identity();
        double dt = 1.0;
        int steps = 0;
        std::vector<tracking::BistaticChannel> channels;
    } passive;

    symbiotic::SymbioticConfig sym;

    /// Parses and validates; throws ConfigError on malformed input,
    /// unknown keys, or a missing section for the chosen experiment.
    static ScenarioConfig from_json(const nlohmann::json& j);
    static ScenarioConfig from_file(const std::string& path);

    /// The shipped default configuration (all four sections populated).
    static nlohmann::json default_json();
};

struct Table {
    std::string name;  // primary table has the experiment's name
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct RunReport {
    std::string experiment;
    std::uint64_t seed = 0;
    int trials = 0;
    double elapsed_s = 0.0;
    nlohmann::json config_echo;
    std::vector<Table> tables;
};

RunReport run_spectrum_experiment(const ScenarioConfig& config);
RunReport run_tracking_experiment(const ScenarioConfig& config);
RunReport run_passive_selection_experiment(const ScenarioConfig& config);
RunReport run_symbiotic_experiment(const ScenarioConfig& config);

/// Dispatches on config.experiment.
RunReport run_experiment(const ScenarioConfig& config);

/// Serializes a table to CSV ("%.17g" doubles, so identical runs are
/// byte-identical).
std::string to_csv(const Table& table);

/// Writes `<dir>/<experiment>[_<table>]_<seed>.csv` per table plus
/// `<dir>/report.json`. Returns the paths written.
std::vector<std::string> write_report(const RunReport& report, const std::string& dir);

}  // namespace cograd::harness
