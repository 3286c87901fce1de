// Microbenchmarks for the hot loops of the simulation experiments.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cograd/bounds.hpp"
#include "cograd/controller.hpp"
#include "cograd/rng.hpp"
#include "cograd/sensing.hpp"
#include "cograd/spectrum_hmm.hpp"
#include "cograd/symbiotic.hpp"

using namespace cograd;

namespace {

spectrum::ObservationWindow make_window(std::size_t n) {
    spectrum::HmmModel m = spectrum::HmmModel::uniform_prior(
        (Eigen::Matrix2d() << 0.9, 0.3, 0.1, 0.7).finished());
    m.A << 0.9, 0.1, 0.1, 0.9;
    const auto [states, obs] = spectrum::simulate_channel(m, static_cast<long>(n), 5);
    (void)states;
    spectrum::ObservationWindow w(n);
    for (int o : obs) w.push(o);
    return w;
}

void bm_baum_welch_window(benchmark::State& state) {
    const auto window = make_window(static_cast<std::size_t>(state.range(0)));
    const Eigen::Matrix2d B =
        (Eigen::Matrix2d() << 0.9, 0.3, 0.1, 0.7).finished();
    spectrum::HmmModel init = spectrum::HmmModel::uniform_prior(B);
    for (auto _ : state) {
        const auto res = spectrum::baum_welch_update(window, B, init, 20, 1e-6);
        benchmark::DoNotOptimize(res.A);
    }
}

void bm_filter_update(benchmark::State& state) {
    spectrum::HmmModel m = spectrum::HmmModel::uniform_prior(
        (Eigen::Matrix2d() << 0.9, 0.3, 0.1, 0.7).finished());
    m.A << 0.9, 0.1, 0.1, 0.9;
    int obs = 0;
    for (auto _ : state) {
        spectrum::filter_update(m, obs);
        obs ^= 1;
        benchmark::DoNotOptimize(m.gamma);
    }
}

void bm_energy_detect(benchmark::State& state) {
    const auto det = sensing::EnergyDetector::from_pfa(16, 1.0, 0.1);
    Rng rng = make_rng(7);
    for (auto _ : state)
        benchmark::DoNotOptimize(sensing::detect(det, 1.0, rng));
}

void bm_fim_step(benchmark::State& state) {
    const auto model = tracking::MotionModel::constant_velocity(0.5, 0.0);
    tracking::MeasJacobian H;
    H << 1.0, 0.0, 0.3, 0.0, 0.1, 1.0, 0.0, 0.7;
    Eigen::Matrix2d R;
    R << 4.0, 0.5, 0.5, 2.0;
    bounds::FisherInfo J =
        bounds::fim_init(Eigen::Vector4d(100.0, 9.0, 100.0, 9.0).asDiagonal());
    for (auto _ : state) {
        J = bounds::fim_step(J, model, H, R, 0.9);
        benchmark::DoNotOptimize(J.J);
    }
}

void bm_select_params(benchmark::State& state) {
    tracking::TrackBelief belief;
    belief.mean << 20000.0, -60.0, 0.0, 30.0;
    belief.cov = Eigen::Vector4d(400.0, 16.0, 400.0, 16.0).asDiagonal();
    const auto model = tracking::MotionModel::constant_velocity(0.5, 1.0);
    const controller::RadarConfig cfg;
    const controller::PerformanceGoals goals;
    const controller::ParamGrids grids = controller::ParamGrids::defaults();
    for (auto _ : state) {
        const auto p = controller::select_params(belief, model, goals, grids, cfg, 100.0);
        benchmark::DoNotOptimize(p.n_pulses);
    }
}

void bm_schedule_frame(benchmark::State& state) {
    symbiotic::CpeNetwork net = symbiotic::CpeNetwork::random_disc(
        static_cast<int>(state.range(0)), Eigen::Vector2d(0.0, 100.0), 600.0, 30.0, 1);
    net.ideal_size = 8;
    net.n_max = 4;
    net.active_ids = {0, 5};
    const auto model = tracking::MotionModel::constant_velocity(1.0, 0.005);
    tracking::TrackBelief belief;
    belief.mean << -100.0, 5.0, 150.0, -3.0;
    belief.cov = Eigen::Vector4d(9.0, 0.09, 9.0, 0.09).asDiagonal();
    for (auto _ : state) {
        const auto dec = symbiotic::schedule_frame(net, belief, model, 0.95);
        benchmark::DoNotOptimize(dec.achieved_trace);
    }
}

}  // namespace

BENCHMARK(bm_baum_welch_window)->Arg(100)->Arg(200)->Arg(400);
BENCHMARK(bm_filter_update);
BENCHMARK(bm_energy_detect);
BENCHMARK(bm_fim_step);
BENCHMARK(bm_select_params);
BENCHMARK(bm_schedule_frame)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
