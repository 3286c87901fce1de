#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "cograd/tracking.hpp"

namespace cograd::symbiotic {

using tracking::BistaticChannel;
using tracking::MotionModel;
using tracking::State;
using tracking::TrackBelief;

/// 802.22-style network of candidate transmitters sharing one receiver.
struct CpeNetwork {
    std::vector<BistaticChannel> cpes;
    std::vector<int> active_ids;  // CPEs transmitting this frame anyway
    int ideal_size = 8;           // M
    int n_max = 4;                // scheduler budget per frame

    void validate() const;

    /// Uniform random placement inside a disc of `radius_m` around the
    /// receiver, at least `min_range_m` out.
    static CpeNetwork random_disc(int n, const Eigen::Vector2d& rx,
                                  double radius_m, double min_range_m,
                                  std::uint64_t seed);
};

struct ScheduleDecision {
    std::vector<int> activated;   // CPE ids switched on this frame (size n)
    double achieved_trace = 0.0;  // Trace P_{k+1|k} over active + activated
    double ideal_trace = 0.0;     // Trace P_{k+1|k} over the ideal subset
    double lambda_sym = 0.0;
};

/// Trace of the one-step prediction covariance fused (in information
/// form) over the given subset of CPEs, with each CPE's term weighted by
/// its detection probability at the predicted mean.
double predicted_trace(const TrackBelief& belief, const MotionModel& model,
                       const std::vector<const BistaticChannel*>& subset);

struct IdealSubset {
    std::vector<int> ids;
    double trace = 0.0;
};

/// Best size-M subset by predicted trace: exhaustive for N <= 20,
/// greedy forward selection beyond that (an approximation; validated
/// against exhaustive oracles on small networks). Trace ties break
/// toward the lowest CPE id.
IdealSubset ideal_subset(const CpeNetwork& network, const TrackBelief& belief,
                         const MotionModel& model);

/// Greedy activation: starting from the frame's active set, repeatedly
/// switches on the silent CPE with the largest trace reduction until
/// lambda_sym * achieved <= ideal or the n_max budget is exhausted.
/// lambda_sym = 0 activates nothing (purely passive).
ScheduleDecision schedule_frame(const CpeNetwork& network, const TrackBelief& belief,
                                const MotionModel& model, double lambda_sym);

struct SymbioticConfig {
    CpeNetwork network;
    MotionModel model;
    State initial_truth = State::Zero();
    Eigen::Matrix4d initial_cov = Eigen::Matrix4d::Identity();
    double lambda_sym = 0.95;
    double p_active = 0.05;  // per-frame Bernoulli activity of each CPE
    int steps = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    double beam_hpbw_rad = 0.0;  // 0 disables the receive-beam gate

    /// Paper-scale geometry at desk size: linear 8.33 m/s crossing of the
    /// surveillance area.
    static SymbioticConfig defaults(int n_cpes, std::uint64_t seed);
};

enum class SchedulerMode { symbiotic, ideal_set };

struct SymbioticStepStats {
    int step = 0;
    double rmse_pos_m = 0.0;
    double mean_n = 0.0;
    double mean_trace_achieved = 0.0;
    double mean_trace_ideal = 0.0;
};

/// Monte Carlo run of the EKF with per-frame scheduling. In ideal_set
/// mode the tracker always fuses the full ideal subset (the performance
/// reference). Measurement noise and per-frame activity depend only on
/// (seed, trial, step, cpe id), so runs with different lambda_sym share
/// common random numbers.
std::vector<SymbioticStepStats> run_symbiotic_scenario(const SymbioticConfig& config,
                                                       SchedulerMode mode);

}  // namespace cograd::symbiotic
