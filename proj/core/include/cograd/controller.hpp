#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "cograd/tracking.hpp"

namespace cograd::controller {

using tracking::MotionModel;
using tracking::State;
using tracking::TrackBelief;

/// Decision variables of one dwell.
struct RadarParams {
    double prf_hz = 6000.0;
    int n_pulses = 128;
};

struct ParamGrids {
    std::vector<double> prfs_hz;
    std::vector<int> pulse_counts;

    static ParamGrids defaults();
    void validate() const;
};

struct PerformanceGoals {
    double range_rmse_goal_m = 10.0;
    double velocity_rmse_goal_mps = 1.0;
    double doppler_upper = 0.5;   // normalized to PRF
    double clutter_lower = 0.05;  // normalized to PRF

    void validate() const;
};

/// Monostatic pulse-Doppler radar configuration. Measurement variances:
///   sigma_v^2 = velocity_var_coeff * (wavelength * prf / (2 n_pulses))^2 / sinr
///   sigma_r^2 = range_var_coeff / (sinr * n_pulses)
/// range_var_coeff is calibrated so the fixed baseline meets its range
/// goal at nominal SINR.
struct RadarConfig {
    double wavelength_m = 0.3;
    double pfa = 1e-4;
    double range_var_coeff = 1.0e6;
    double velocity_var_coeff = 1.0;
    Eigen::Vector2d radar_pos = Eigen::Vector2d::Zero();
};

struct DwellForecast {
    double pred_rmse_range = 0.0;
    double pred_rmse_velocity = 0.0;
    double max_doppler = 0.0;   // normalized, mean + 2 sigma
    double mean_doppler = 0.0;  // normalized
    double dwell_time = 0.0;    // n_pulses / prf, seconds
};

/// Noiseless monostatic measurement [range, radial velocity] and its
/// Jacobian, used by both the forecast and the tracking loop.
Eigen::Vector2d radar_measure(const State& state, const RadarConfig& cfg);
tracking::MeasJacobian radar_jacobian(const State& state, const RadarConfig& cfg);
Eigen::Matrix2d radar_covariance(const RadarConfig& cfg, const RadarParams& params,
                                 double sinr);

/// Predicted-bound performance of one candidate parameter set: posterior
/// information at the predicted mean mapped back to range/velocity RMSE,
/// plus the Doppler placement of the predicted target.
DwellForecast forecast(const TrackBelief& belief, const MotionModel& model,
                       const RadarParams& params, const RadarConfig& cfg,
                       double sinr);

/// Exhaustive grid search: among candidates meeting the Doppler bounds
/// and both RMSE goals, the one with minimum dwell time (ties: lower
/// n_pulses, then lower prf). If nothing is feasible, the candidate with
/// the smallest total relative constraint violation wins (same
/// tie-break).
RadarParams select_params(const TrackBelief& belief, const MotionModel& model,
                          const PerformanceGoals& goals, const ParamGrids& grids,
                          const RadarConfig& cfg, double sinr);

enum class Mode { fixed, cognitive };

struct TrackScenario {
    State initial_truth = State::Zero();
    State initial_estimate = State::Zero();
    Eigen::Matrix4d initial_cov = Eigen::Matrix4d::Identity();
    MotionModel model;
    RadarConfig radar;
    PerformanceGoals goals;
    ParamGrids grids = ParamGrids::defaults();
    RadarParams fixed_params{6000.0, 128};
    std::vector<double> sinr_db_timeline;  // one entry per dwell
    std::uint64_t seed = 0;

    /// Target starting 20 km out with two scripted SINR dips.
    static TrackScenario defaults(std::uint64_t seed);
};

struct DwellLog {
    double time_s = 0.0;
    double prf_hz = 0.0;
    int n_pulses = 0;
    double pred_rmse_r = 0.0;
    double act_err_r = 0.0;
    double pred_rmse_v = 0.0;
    double act_err_v = 0.0;
    double norm_doppler_mean = 0.0;
    double norm_doppler_max = 0.0;
    double sinr_db = 0.0;
};

/// Runs the tracking loop in fixed or cognitive mode. Both modes consume
/// the same per-dwell random draws, so their logs are comparable under
/// common random numbers. The controller forecasts with the previous
/// dwell's SINR (one-dwell measurement lag).
std::vector<DwellLog> run_cognitive_track(const TrackScenario& scenario, Mode mode);

}  // namespace cograd::controller
