#include "cograd/controller.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "cograd/errors.hpp"
#include "cograd/rng.hpp"

namespace cograd::controller {

ParamGrids ParamGrids::defaults() {
    ParamGrids g;
    g.prfs_hz = {2000, 3000, 4000, 5000, 6000, 8000, 10000};
    g.pulse_counts = {32, 64, 128, 256, 512};
    return g;
}

void ParamGrids::validate() const {
    if (prfs_hz.empty() || pulse_counts.empty())
        throw InvalidInput("parameter grids must be non-empty");
    for (double p : prfs_hz)
        if (p <= 0.0) throw InvalidInput("PRF values must be positive");
    for (int n : pulse_counts)
        if (n < 1) throw InvalidInput("pulse counts must be >= 1");
}

void PerformanceGoals::validate() const {
    if (!(0.0 <= clutter_lower && clutter_lower < doppler_upper && doppler_upper <= 0.5))
        throw InvalidInput("require 0 <= clutter_lower < doppler_upper <= 0.5");
    if (range_rmse_goal_m <= 0.0 || velocity_rmse_goal_mps <= 0.0)
        throw InvalidInput("RMSE goals must be positive");
}

Eigen::Vector2d radar_measure(const State& state, const RadarConfig& cfg) {
    const Eigen::Vector2d d = tracking::position_of(state) - cfg.radar_pos;
    const double rho = d.norm();
    if (rho < 1e-6) throw InvalidInput("target coincides with the radar");
    return {rho, d.dot(tracking::velocity_of(state)) / rho};
}

tracking::MeasJacobian radar_jacobian(const State& state, const RadarConfig& cfg) {
    const Eigen::Vector2d d = tracking::position_of(state) - cfg.radar_pos;
    const double rho = d.norm();
    if (rho < 1e-6) throw InvalidInput("target coincides with the radar");
    const Eigen::Vector2d u = d / rho;
    const Eigen::Vector2d vel = tracking::velocity_of(state);
    const Eigen::Vector2d dv_dp = (vel - u * u.dot(vel)) / rho;

    tracking::MeasJacobian H;
    H << u(0),     0.0,  u(1),     0.0,
         dv_dp(0), u(0), dv_dp(1), u(1);
    return H;
}

Eigen::Matrix2d radar_covariance(const RadarConfig& cfg, const RadarParams& params,
                                 double sinr) {
    if (sinr <= 0.0) throw InvalidInput("sinr must be positive");
    const double bin = cfg.wavelength_m * params.prf_hz / (2.0 * params.n_pulses);
    Eigen::Matrix2d R = Eigen::Matrix2d::Zero();
    R(0, 0) = cfg.range_var_coeff / (sinr * params.n_pulses);
    R(1, 1) = cfg.velocity_var_coeff * bin * bin / sinr;
    return R;
}

DwellForecast forecast(const TrackBelief& belief, const MotionModel& model,
                       const RadarParams& params, const RadarConfig& cfg,
                       double sinr) {
    const State pred_mean = model.F * belief.mean;
    Eigen::Matrix4d P_pred = model.F * belief.cov * model.F.transpose() + model.Q;
    P_pred = 0.5 * (P_pred + P_pred.transpose());

    const tracking::MeasJacobian H = radar_jacobian(pred_mean, cfg);
    const Eigen::Matrix2d R = radar_covariance(cfg, params, sinr);
    const double pd = tracking::detection_probability(sinr, cfg.pfa);

    Eigen::LLT<Eigen::Matrix4d> llt(P_pred);
    if (llt.info() != Eigen::Success)
        throw NumericalError("predicted covariance is not positive definite");
    const Eigen::Matrix4d J_prior = llt.solve(Eigen::Matrix4d::Identity());

    Eigen::Matrix2d Rinv = Eigen::Matrix2d::Zero();
    Rinv(0, 0) = 1.0 / R(0, 0);
    Rinv(1, 1) = 1.0 / R(1, 1);
    const Eigen::Matrix4d J = J_prior + pd * H.transpose() * Rinv * H;

    Eigen::FullPivLU<Eigen::Matrix4d> lu(J);
    if (!lu.isInvertible())
        throw NumericalError("predicted information matrix is singular");
    const Eigen::Matrix4d C = lu.inverse();
    const Eigen::Matrix2d M = H * C * H.transpose();

    DwellForecast f;
    f.pred_rmse_range = std::sqrt(M(0, 0));
    f.pred_rmse_velocity = std::sqrt(M(1, 1));

    const double v_radial = radar_measure(pred_mean, cfg)(1);
    const double sigma_v = std::sqrt((H * P_pred * H.transpose())(1, 1));
    const double to_doppler = 2.0 / (cfg.wavelength_m * params.prf_hz);
    f.mean_doppler = std::abs(v_radial) * to_doppler;
    f.max_doppler = (std::abs(v_radial) + 2.0 * sigma_v) * to_doppler;
    f.dwell_time = params.n_pulses / params.prf_hz;
    return f;
}

RadarParams select_params(const TrackBelief& belief, const MotionModel& model,
                          const PerformanceGoals& goals, const ParamGrids& grids,
                          const RadarConfig& cfg, double sinr) {
    grids.validate();
    goals.validate();

    bool found_feasible = false;
    RadarParams best;
    double best_cost = 0.0;
    double best_violation = 0.0;
    bool have_any = false;

    auto better = [](double cost_a, const RadarParams& a,
                     double cost_b, const RadarParams& b) {
        if (cost_a != cost_b) return cost_a < cost_b;
        if (a.n_pulses != b.n_pulses) return a.n_pulses < b.n_pulses;
        return a.prf_hz < b.prf_hz;
    };

    for (double prf : grids.prfs_hz) {
        for (int np : grids.pulse_counts) {
            const RadarParams cand{prf, np};
            const DwellForecast f = forecast(belief, model, cand, cfg, sinr);

            const bool feasible =
                f.max_doppler <= goals.doppler_upper &&
                f.mean_doppler >= goals.clutter_lower &&
                f.pred_rmse_range <= goals.range_rmse_goal_m &&
                f.pred_rmse_velocity <= goals.velocity_rmse_goal_mps;

            if (feasible) {
                if (!found_feasible || better(f.dwell_time, cand, best_cost, best)) {
                    found_feasible = true;
                    best = cand;
                    best_cost = f.dwell_time;
                }
            } else if (!found_feasible) {
                // Equal-weight relative violations across the four constraints.
                double v = 0.0;
                v += std::max(0.0, f.max_doppler - goals.doppler_upper) / goals.doppler_upper;
                if (goals.clutter_lower > 0.0)
                    v += std::max(0.0, goals.clutter_lower - f.mean_doppler) / goals.clutter_lower;
                v += std::max(0.0, f.pred_rmse_range - goals.range_rmse_goal_m) /
                     goals.range_rmse_goal_m;
                v += std::max(0.0, f.pred_rmse_velocity - goals.velocity_rmse_goal_mps) /
                     goals.velocity_rmse_goal_mps;
                if (!have_any || better(v, cand, best_violation, best)) {
                    have_any = true;
                    best = cand;
                    best_violation = v;
                }
            }
        }
    }
    return best;
}

TrackScenario TrackScenario::defaults(std::uint64_t seed) {
    TrackScenario s;
    s.initial_truth << 20000.0, -60.0, 0.0, 30.0;
    s.initial_estimate = s.initial_truth;
    s.initial_cov = Eigen::Vector4d(400.0, 16.0, 400.0, 16.0).asDiagonal();
    s.model = MotionModel::constant_velocity(0.5, 1.0);
    s.radar.wavelength_m = 0.3;
    s.radar.pfa = 1e-4;
    s.radar.velocity_var_coeff = 1.0;
    // Baseline (6 kHz, 128 pulses) range RMSE ~0.9x goal at nominal 20 dB.
    s.radar.range_var_coeff = 0.81 * 100.0 * 100.0 * 128.0;
    s.goals.range_rmse_goal_m = 10.0;
    s.goals.velocity_rmse_goal_mps = 1.0;
    s.goals.doppler_upper = 0.5;
    s.goals.clutter_lower = 0.05;
    s.seed = seed;

    // 100 dwells at 20 dB nominal with two dips to 3 dB.
    s.sinr_db_timeline.assign(100, 20.0);
    for (int k = 30; k < 41; ++k) s.sinr_db_timeline[k] = 10.0;
    for (int k = 60; k < 71; ++k) s.sinr_db_timeline[k] = 10.0;
    return s;
}

std::vector<DwellLog> run_cognitive_track(const TrackScenario& scenario, Mode mode) {
    if (scenario.sinr_db_timeline.empty())
        throw InvalidInput("scenario needs a SINR timeline");
    scenario.goals.validate();
    scenario.grids.validate();

    const auto& cfg = scenario.radar;
    const MotionModel& model = scenario.model;

    State truth = scenario.initial_truth;
    TrackBelief belief;
    belief.mean = scenario.initial_estimate;
    belief.cov = scenario.initial_cov;

    const std::size_t dwells = scenario.sinr_db_timeline.size();
    std::vector<DwellLog> log;
    log.reserve(dwells);

    double sinr_known = std::pow(10.0, scenario.sinr_db_timeline.front() / 10.0);

    for (std::size_t k = 0; k < dwells; ++k) {
        const double sinr_db = scenario.sinr_db_timeline[k];
        const double sinr_actual = std::pow(10.0, sinr_db / 10.0);

        RadarParams params = scenario.fixed_params;
        if (mode == Mode::cognitive)
            params = select_params(belief, model, scenario.goals, scenario.grids,
                                   cfg, sinr_known);
        const DwellForecast f = forecast(belief, model, params, cfg, sinr_known);

        truth = model.F * truth;

        // Common random numbers: the draws depend only on (seed, dwell).
        Rng rng = make_rng(derive_seed(scenario.seed, k));
        std::normal_distribution<double> stdnorm(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const double u_detect = unif(rng);
        const Eigen::Vector2d w(stdnorm(rng), stdnorm(rng));

        const double pd = tracking::detection_probability(sinr_actual, cfg.pfa);
        const bool detected = u_detect < pd;

        // Predict.
        TrackBelief next;
        next.pred_mean = model.F * belief.mean;
        next.pred_cov = model.F * belief.cov * model.F.transpose() + model.Q;
        next.pred_cov = 0.5 * (next.pred_cov + next.pred_cov.transpose());
        next.mean = next.pred_mean;
        next.cov = next.pred_cov;

        if (detected) {
            const Eigen::Matrix2d R_act = radar_covariance(cfg, params, sinr_actual);
            Eigen::Vector2d z = radar_measure(truth, cfg);
            z(0) += std::sqrt(R_act(0, 0)) * w(0);
            z(1) += std::sqrt(R_act(1, 1)) * w(1);

            const tracking::MeasJacobian H = radar_jacobian(next.pred_mean, cfg);
            const Eigen::Matrix2d R = radar_covariance(cfg, params, sinr_known);
            const Eigen::Vector2d innov = z - radar_measure(next.pred_mean, cfg);
            const Eigen::Matrix2d S = H * next.pred_cov * H.transpose() + R;
            Eigen::LLT<Eigen::Matrix2d> llt(S);
            if (llt.info() != Eigen::Success)
                throw NumericalError("innovation covariance is not invertible");
            const Eigen::Matrix<double, 4, 2> K =
                next.pred_cov * H.transpose() * llt.solve(Eigen::Matrix2d::Identity());
            next.mean = next.pred_mean + K * innov;
            const Eigen::Matrix4d IKH = Eigen::Matrix4d::Identity() - K * H;
            Eigen::Matrix4d P =
                IKH * next.pred_cov * IKH.transpose() + K * R * K.transpose();
            next.cov = 0.5 * (P + P.transpose());
        }
        belief = next;

        const Eigen::Vector2d z_true = radar_measure(truth, cfg);
        const Eigen::Vector2d z_est = radar_measure(belief.mean, cfg);

        DwellLog d;
        d.time_s = static_cast<double>(k) * model.dt;
        d.prf_hz = params.prf_hz;
        d.n_pulses = params.n_pulses;
        d.pred_rmse_r = f.pred_rmse_range;
        d.act_err_r = std::abs(z_est(0) - z_true(0));
        d.pred_rmse_v = f.pred_rmse_velocity;
        d.act_err_v = std::abs(z_est(1) - z_true(1));
        d.norm_doppler_mean = f.mean_doppler;
        d.norm_doppler_max = f.max_doppler;
        d.sinr_db = sinr_db;
        log.push_back(d);

        sinr_known = sinr_actual;  // measured for the next dwell
    }
    return log;
}

}  // namespace cograd::controller
