#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cograd/controller.hpp"
#include "cograd/rng.hpp"

using namespace cograd;
using namespace cograd::controller;

namespace {

// Independent re-statement of the dwell-parameter rule: among grid
// candidates meeting the Doppler window and both RMSE goals, minimize
// dwell time (ties: fewer pulses, then lower PRF); if none is feasible,
// minimize the sum of relative constraint violations (same tie-break).
RadarParams brute_force_select(const TrackBelief& belief, const MotionModel& model,
                               const PerformanceGoals& goals, const ParamGrids& grids,
                               const RadarConfig& cfg, double sinr) {
    struct Scored {
        RadarParams p;
        bool feasible = false;
        double cost = 0.0;
    };
    std::vector<Scored> all;
    for (double prf : grids.prfs_hz) {
        for (int np : grids.pulse_counts) {
            Scored s;
            s.p = {prf, np};
            const DwellForecast f = forecast(belief, model, s.p, cfg, sinr);
            s.feasible = f.max_doppler <= goals.doppler_upper &&
                         f.mean_doppler >= goals.clutter_lower &&
                         f.pred_rmse_range <= goals.range_rmse_goal_m &&
                         f.pred_rmse_velocity <= goals.velocity_rmse_goal_mps;
            if (s.feasible) {
                s.cost = f.dwell_time;
            } else {
                double v = 0.0;
                v += std::max(0.0, f.max_doppler - goals.doppler_upper) /
                     goals.doppler_upper;
                if (goals.clutter_lower > 0.0)
                    v += std::max(0.0, goals.clutter_lower - f.mean_doppler) /
                         goals.clutter_lower;
                v += std::max(0.0, f.pred_rmse_range - goals.range_rmse_goal_m) /
                     goals.range_rmse_goal_m;
                v += std::max(0.0, f.pred_rmse_velocity - goals.velocity_rmse_goal_mps) /
                     goals.velocity_rmse_goal_mps;
                s.cost = v;
            }
            all.push_back(s);
        }
    }
    const bool any_feasible =
        std::any_of(all.begin(), all.end(), [](const Scored& s) { return s.feasible; });
    const Scored* best = nullptr;
    for (const Scored& s : all) {
        if (any_feasible && !s.feasible) continue;
        if (!best) { best = &s; continue; }
        bool wins = false;
        if (s.cost != best->cost)
            wins = s.cost < best->cost;
        else if (s.p.n_pulses != best->p.n_pulses)
            wins = s.p.n_pulses < best->p.n_pulses;
        else
            wins = s.p.prf_hz < best->p.prf_hz;
        if (wins) best = &s;
    }
    REQUIRE(best != nullptr);
    return best->p;
}

}  // namespace

TEST_CASE("dwell parameter selection matches the brute-force rule exactly") {
    Rng rng = make_rng(8675309);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    for (int trial = 0; trial < 1000; ++trial) {
        // Random target geometry and belief.
        TrackBelief belief;
        belief.mean << 2000.0 + 30000.0 * unif(rng), -80.0 + 160.0 * unif(rng),
            -5000.0 + 10000.0 * unif(rng), -80.0 + 160.0 * unif(rng);
        const double pv = 1.0 + 400.0 * unif(rng);
        const double vv = 0.1 + 30.0 * unif(rng);
        belief.cov = Eigen::Vector4d(pv, vv, pv, vv).asDiagonal();

        const MotionModel model =
            MotionModel::constant_velocity(0.2 + unif(rng), 2.0 * unif(rng));

        RadarConfig cfg;
        cfg.wavelength_m = 0.05 + 0.5 * unif(rng);
        cfg.range_var_coeff = std::pow(10.0, 5.0 + 3.0 * unif(rng));
        cfg.velocity_var_coeff = 0.5 + unif(rng);

        PerformanceGoals goals;
        goals.range_rmse_goal_m = 2.0 + 20.0 * unif(rng);
        goals.velocity_rmse_goal_mps = 0.2 + 2.0 * unif(rng);
        goals.doppler_upper = 0.2 + 0.3 * unif(rng);
        goals.clutter_lower = 0.1 * unif(rng);

        // Random sub-grid of the default candidate lattice.
        const ParamGrids full = ParamGrids::defaults();
        ParamGrids grids;
        for (double prf : full.prfs_hz)
            if (unif(rng) < 0.7) grids.prfs_hz.push_back(prf);
        if (grids.prfs_hz.empty()) grids.prfs_hz.push_back(full.prfs_hz.front());
        for (int np : full.pulse_counts)
            if (unif(rng) < 0.7) grids.pulse_counts.push_back(np);
        if (grids.pulse_counts.empty())
            grids.pulse_counts.push_back(full.pulse_counts.front());

        const double sinr = std::pow(10.0, (-5.0 + 30.0 * unif(rng)) / 10.0);

        const RadarParams got = select_params(belief, model, goals, grids, cfg, sinr);
        const RadarParams want = brute_force_select(belief, model, goals, grids, cfg, sinr);
        CHECK(got.prf_hz == want.prf_hz);
        CHECK(got.n_pulses == want.n_pulses);
    }
}

TEST_CASE("radar measurement covariance follows the dwell parameters") {
    RadarConfig cfg;
    cfg.wavelength_m = 0.3;
    cfg.range_var_coeff = 2.0e6;
    cfg.velocity_var_coeff = 1.5;
    const RadarParams p{8000.0, 256};
    const double sinr = 50.0;
    const Eigen::Matrix2d R = radar_covariance(cfg, p, sinr);
    CHECK(R(0, 0) == doctest::Approx(2.0e6 / (50.0 * 256)));
    const double bin = 0.3 * 8000.0 / (2.0 * 256);
    CHECK(R(1, 1) == doctest::Approx(1.5 * bin * bin / 50.0));
    CHECK(R(0, 1) == 0.0);

    // More pulses refine both axes; higher PRF only coarsens velocity.
    const Eigen::Matrix2d R2 = radar_covariance(cfg, {8000.0, 512}, sinr);
    CHECK(R2(0, 0) < R(0, 0));
    CHECK(R2(1, 1) < R(1, 1));
    const Eigen::Matrix2d R3 = radar_covariance(cfg, {16000.0, 256}, sinr);
    CHECK(R3(0, 0) == doctest::Approx(R(0, 0)));
    CHECK(R3(1, 1) > R(1, 1));
}

TEST_CASE("forecast reports dwell time and Doppler placement") {
    TrackBelief belief;
    belief.mean << 20000.0, -60.0, 0.0, 30.0;
    belief.cov = Eigen::Vector4d(400.0, 16.0, 400.0, 16.0).asDiagonal();
    const MotionModel model = MotionModel::constant_velocity(0.5, 1.0);
    RadarConfig cfg;
    cfg.wavelength_m = 0.3;
    const RadarParams p{6000.0, 128};
    const DwellForecast f = forecast(belief, model, p, cfg, 100.0);

    CHECK(f.dwell_time == doctest::Approx(128.0 / 6000.0));
    CHECK(f.max_doppler >= f.mean_doppler);
    CHECK(f.pred_rmse_range > 0.0);
    CHECK(f.pred_rmse_velocity > 0.0);

    // Doppler placement scales inversely with PRF.
    const DwellForecast g = forecast(belief, model, {12000.0, 128}, cfg, 100.0);
    CHECK(g.mean_doppler == doctest::Approx(f.mean_doppler / 2.0));
}

TEST_CASE("cognitive mode honors Doppler bounds where the fixed mode drifts") {
    const TrackScenario scenario = TrackScenario::defaults(7);
    const auto cog = run_cognitive_track(scenario, Mode::cognitive);
    REQUIRE(!cog.empty());
    for (const auto& d : cog) {
        CHECK(d.norm_doppler_max <= scenario.goals.doppler_upper + 1e-12);
        CHECK(d.norm_doppler_mean >= scenario.goals.clutter_lower - 1e-12);
    }

    // Common random numbers: both modes log identical SINR timelines.
    const auto fix = run_cognitive_track(scenario, Mode::fixed);
    REQUIRE(fix.size() == cog.size());
    for (std::size_t k = 0; k < fix.size(); ++k)
        CHECK(fix[k].sinr_db == cog[k].sinr_db);
}

TEST_CASE("grid validation rejects empty and non-positive entries") {
    ParamGrids g = ParamGrids::defaults();
    CHECK_NOTHROW(g.validate());
    g.prfs_hz.clear();
    CHECK_THROWS_AS(g.validate(), InvalidInput);
    g = ParamGrids::defaults();
    g.pulse_counts.push_back(0);
    CHECK_THROWS_AS(g.validate(), InvalidInput);
}
