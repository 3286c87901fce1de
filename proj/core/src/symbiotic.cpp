#include "cograd/symbiotic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "cograd/errors.hpp"
#include "cograd/rng.hpp"

namespace cograd::symbiotic {

namespace {

// Per-frame cache: prediction information plus each CPE's (detection
// weighted) measurement information increment at the predicted mean.
struct FrameInfo {
    Eigen::Matrix4d J_pred = Eigen::Matrix4d::Zero();
    std::vector<Eigen::Matrix4d> increment;  // parallel to network.cpes
};

FrameInfo frame_info(const std::vector<BistaticChannel>& cpes,
                     const TrackBelief& belief, const MotionModel& model) {
    FrameInfo fi;
    const State pred_mean = model.F * belief.mean;
    Eigen::Matrix4d P_pred = model.F * belief.cov * model.F.transpose() + model.Q;
    P_pred = 0.5 * (P_pred + P_pred.transpose());
    Eigen::LLT<Eigen::Matrix4d> llt(P_pred);
    if (llt.info() != Eigen::Success)
        throw NumericalError("prediction covariance is not positive definite");
    fi.J_pred = llt.solve(Eigen::Matrix4d::Identity());
    fi.J_pred = 0.5 * (fi.J_pred + fi.J_pred.transpose());

    fi.increment.reserve(cpes.size());
    for (const auto& ch : cpes) {
        const double snr = tracking::snr_at(pred_mean, ch);
        const double pd = tracking::detection_probability(snr, ch.pfa);
        const Eigen::Matrix2d R = tracking::measurement_covariance(ch, snr);
        const tracking::MeasJacobian H = tracking::measurement_jacobian(pred_mean, ch);
        Eigen::LLT<Eigen::Matrix2d> rllt(R);
        if (rllt.info() != Eigen::Success)
            throw NumericalError("CPE measurement covariance is not positive definite");
        const Eigen::Matrix2d Rinv = rllt.solve(Eigen::Matrix2d::Identity());
        fi.increment.push_back(pd * H.transpose() * Rinv * H);
    }
    return fi;
}

double trace_of(const FrameInfo& fi, const std::vector<std::size_t>& subset) {
    Eigen::Matrix4d J = fi.J_pred;
    for (std::size_t i : subset) J += fi.increment[i];
    Eigen::FullPivLU<Eigen::Matrix4d> lu(J);
    if (!lu.isInvertible())
        throw NumericalError("fused information matrix is singular");
    return lu.inverse().trace();
}

std::size_t index_of(const std::vector<BistaticChannel>& cpes, int id) {
    for (std::size_t i = 0; i < cpes.size(); ++i)
        if (cpes[i].id == id) return i;
    throw InvalidInput("unknown CPE id " + std::to_string(id));
}

// Greedy forward selection of `count` indices minimizing the trace.
// Ties break toward the lowest CPE id.
std::vector<std::size_t> greedy_select(const FrameInfo& fi,
                                       const std::vector<BistaticChannel>& cpes,
                                       std::vector<std::size_t> chosen,
                                       const std::vector<std::size_t>& pool,
                                       std::size_t count) {
    std::vector<std::size_t> remaining = pool;
    while (chosen.size() < count && !remaining.empty()) {
        double best_trace = 0.0;
        std::size_t best_pos = remaining.size();
        for (std::size_t p = 0; p < remaining.size(); ++p) {
            std::vector<std::size_t> trial = chosen;
            trial.push_back(remaining[p]);
            const double tr = trace_of(fi, trial);
            if (best_pos == remaining.size() || tr < best_trace ||
                (tr == best_trace && cpes[remaining[p]].id < cpes[remaining[best_pos]].id))
                { best_trace = tr; best_pos = p; }
        }
        chosen.push_back(remaining[best_pos]);
        remaining.erase(remaining.begin() + static_cast<long>(best_pos));
    }
    return chosen;
}

}  // namespace

void CpeNetwork::validate() const {
    if (cpes.empty()) throw InvalidInput("CPE network is empty");
    const int n = static_cast<int>(cpes.size());
    if (!(0 <= n_max && n_max <= ideal_size && ideal_size <= n))
        throw InvalidInput("require 0 <= n_max <= M <= N");
    for (int id : active_ids) index_of(cpes, id);
}

CpeNetwork CpeNetwork::random_disc(int n, const Eigen::Vector2d& rx,
                                   double radius_m, double min_range_m,
                                   std::uint64_t seed) {
    if (n < 1) throw InvalidInput("need at least one CPE");
    CpeNetwork net;
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    net.cpes.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        BistaticChannel ch;
        ch.id = i;
        ch.waveform = "CPE-802.22";
        ch.rx = rx;
        do {
            const double r = radius_m * std::sqrt(unif(rng));
            const double th = 2.0 * M_PI * unif(rng);
            ch.tx = rx + Eigen::Vector2d(r * std::cos(th), r * std::sin(th));
        } while ((ch.tx - rx).norm() < min_range_m);
        ch.wavelength = 0.5;
        ch.r0 = Eigen::Vector2d(400.0, 1.0).asDiagonal();  // 20 m, 1 m/s at ref
        ch.ref_snr = 100.0;
        ch.ref_range_product = 2.0e4;
        ch.pfa = 1e-4;
        net.cpes.push_back(ch);
    }
    return net;
}

double predicted_trace(const TrackBelief& belief, const MotionModel& model,
                       const std::vector<const BistaticChannel*>& subset) {
    std::vector<BistaticChannel> cpes;
    cpes.reserve(subset.size());
    for (const auto* ch : subset) cpes.push_back(*ch);
    const FrameInfo fi = frame_info(cpes, belief, model);
    std::vector<std::size_t> all(cpes.size());
    std::iota(all.begin(), all.end(), 0u);
    return trace_of(fi, all);
}

IdealSubset ideal_subset(const CpeNetwork& network, const TrackBelief& belief,
                         const MotionModel& model) {
    network.validate();
    const auto& cpes = network.cpes;
    const std::size_t N = cpes.size();
    const std::size_t M = static_cast<std::size_t>(network.ideal_size);
    const FrameInfo fi = frame_info(cpes, belief, model);

    std::vector<std::size_t> best;
    double best_trace = 0.0;

    if (N <= 20) {
        // Exhaustive C(N, M) search in lexicographic id order.
        std::vector<std::size_t> comb(M);
        std::iota(comb.begin(), comb.end(), 0u);
        bool first = true;
        while (true) {
            const double tr = trace_of(fi, comb);
            if (first || tr < best_trace) {
                first = false;
                best_trace = tr;
                best = comb;
            }
            // next combination
            long i = static_cast<long>(M) - 1;
            while (i >= 0 && comb[static_cast<std::size_t>(i)] ==
                                 N - M + static_cast<std::size_t>(i))
                --i;
            if (i < 0) break;
            ++comb[static_cast<std::size_t>(i)];
            for (std::size_t j = static_cast<std::size_t>(i) + 1; j < M; ++j)
                comb[j] = comb[j - 1] + 1;
        }
    } else {
        std::vector<std::size_t> pool(N);
        std::iota(pool.begin(), pool.end(), 0u);
        best = greedy_select(fi, cpes, {}, pool, M);
        best_trace = trace_of(fi, best);
    }

    IdealSubset out;
    out.trace = best_trace;
    for (std::size_t i : best) out.ids.push_back(cpes[i].id);
    std::sort(out.ids.begin(), out.ids.end());
    return out;
}

ScheduleDecision schedule_frame(const CpeNetwork& network, const TrackBelief& belief,
                                const MotionModel& model, double lambda_sym) {
    if (lambda_sym < 0.0 || lambda_sym >= 1.0)
        throw InvalidInput("lambda_sym must lie in [0, 1)");
    network.validate();

    const auto& cpes = network.cpes;
    const FrameInfo fi = frame_info(cpes, belief, model);

    std::vector<std::size_t> active;
    for (int id : network.active_ids) active.push_back(index_of(cpes, id));
    std::sort(active.begin(), active.end());

    const IdealSubset ideal = ideal_subset(network, belief, model);

    ScheduleDecision dec;
    dec.lambda_sym = lambda_sym;
    dec.ideal_trace = ideal.trace;
    dec.achieved_trace = trace_of(fi, active);
    if (lambda_sym == 0.0) return dec;  // purely passive

    std::vector<std::size_t> silent;
    for (std::size_t i = 0; i < cpes.size(); ++i)
        if (std::find(active.begin(), active.end(), i) == active.end())
            silent.push_back(i);

    std::vector<std::size_t> chosen = active;
    while (dec.activated.size() < static_cast<std::size_t>(network.n_max) &&
           lambda_sym * dec.achieved_trace > dec.ideal_trace && !silent.empty()) {
        double best_trace = 0.0;
        std::size_t best_pos = silent.size();
        for (std::size_t p = 0; p < silent.size(); ++p) {
            std::vector<std::size_t> trial = chosen;
            trial.push_back(silent[p]);
            const double tr = trace_of(fi, trial);
            if (best_pos == silent.size() || tr < best_trace ||
                (tr == best_trace && cpes[silent[p]].id < cpes[silent[best_pos]].id))
                { best_trace = tr; best_pos = p; }
        }
        chosen.push_back(silent[best_pos]);
        dec.activated.push_back(cpes[silent[best_pos]].id);
        dec.achieved_trace = best_trace;
        silent.erase(silent.begin() + static_cast<long>(best_pos));
    }
    return dec;
}

SymbioticConfig SymbioticConfig::defaults(int n_cpes, std::uint64_t seed) {
    SymbioticConfig c;
    const Eigen::Vector2d rx(0.0, 100.0);
    c.network = CpeNetwork::random_disc(n_cpes, rx, 600.0, 30.0, derive_seed(seed, 9001));
    c.network.ideal_size = 8;
    c.network.n_max = 4;
    c.model = MotionModel::constant_velocity(1.0, 0.005);

    // Straight crossing at 8.33 m/s.
    const Eigen::Vector2d start(-400.0, 400.0);
    const Eigen::Vector2d stop(400.0, -250.0);
    const Eigen::Vector2d dir = (stop - start).normalized();
    const double speed = 8.33;
    c.initial_truth << start(0), speed * dir(0), start(1), speed * dir(1);
    c.initial_cov = Eigen::Vector4d(9.0, 0.09, 9.0, 0.09).asDiagonal();
    c.steps = static_cast<int>((stop - start).norm() / speed);
    c.trials = 200;
    c.lambda_sym = 0.95;
    c.p_active = 0.05;
    c.seed = seed;
    return c;
}

std::vector<SymbioticStepStats> run_symbiotic_scenario(const SymbioticConfig& config,
                                                       SchedulerMode mode) {
    config.network.validate();
    if (config.steps < 1 || config.trials < 1)
        throw InvalidInput("steps and trials must be >= 1");

    const auto& cpes = config.network.cpes;
    const MotionModel& model = config.model;
    const std::size_t steps = static_cast<std::size_t>(config.steps);

    std::vector<double> sq_err(steps, 0.0), sum_n(steps, 0.0);
    std::vector<double> sum_ach(steps, 0.0), sum_ideal(steps, 0.0);

    for (int trial = 0; trial < config.trials; ++trial) {
        const std::uint64_t trial_seed = derive_seed(config.seed, trial);

        State truth = config.initial_truth;
        TrackBelief belief;
        belief.cov = config.initial_cov;
        {
            // Initial estimate drawn from the prior (stream index past any
            // per-CPE stream so it never collides with them).
            Rng irng = make_rng(derive_seed(trial_seed, 0, 2 * cpes.size() + 1));
            std::normal_distribution<double> stdnorm(0.0, 1.0);
            Eigen::Vector4d w;
            for (int i = 0; i < 4; ++i) w(i) = stdnorm(irng);
            const Eigen::Matrix4d L = Eigen::LLT<Eigen::Matrix4d>(belief.cov).matrixL();
            belief.mean = config.initial_truth + L * w;
        }

        for (std::size_t k = 0; k < steps; ++k) {
            truth = model.F * truth;

            // Frame activity, common across scheduler configurations.
            CpeNetwork frame = config.network;
            frame.active_ids.clear();
            for (const auto& ch : cpes) {
                Rng arng = make_rng(derive_seed(trial_seed, k, 2 * ch.id));
                if (std::uniform_real_distribution<double>(0.0, 1.0)(arng) < config.p_active)
                    frame.active_ids.push_back(ch.id);
            }

            std::vector<int> used = frame.active_ids;
            ScheduleDecision dec;
            if (mode == SchedulerMode::ideal_set) {
                const IdealSubset ideal = ideal_subset(frame, belief, model);
                used = ideal.ids;
                dec.ideal_trace = ideal.trace;
                dec.achieved_trace = ideal.trace;
            } else {
                dec = schedule_frame(frame, belief, model, config.lambda_sym);
                used.insert(used.end(), dec.activated.begin(), dec.activated.end());
            }
            std::sort(used.begin(), used.end());
            used.erase(std::unique(used.begin(), used.end()), used.end());

            // EKF: one predict, then sequential updates over the used CPEs.
            TrackBelief next;
            next.pred_mean = model.F * belief.mean;
            next.pred_cov = model.F * belief.cov * model.F.transpose() + model.Q;
            next.pred_cov = 0.5 * (next.pred_cov + next.pred_cov.transpose());
            next.mean = next.pred_mean;
            next.cov = next.pred_cov;

            const Eigen::Vector2d pred_pos = tracking::position_of(next.pred_mean);
            for (int id : used) {
                const BistaticChannel& ch = cpes[index_of(cpes, id)];
                Rng mrng = make_rng(derive_seed(trial_seed, k, 2 * ch.id + 1));
                std::uniform_real_distribution<double> unif(0.0, 1.0);
                std::normal_distribution<double> stdnorm(0.0, 1.0);

                if (config.beam_hpbw_rad > 0.0 &&
                    !tracking::in_beam(ch.rx, pred_pos, tracking::position_of(truth),
                                       config.beam_hpbw_rad))
                    continue;

                const double snr_true = tracking::snr_at(truth, ch);
                const double pd = tracking::detection_probability(snr_true, ch.pfa);
                const double u = unif(mrng);
                const Eigen::Vector2d w(stdnorm(mrng), stdnorm(mrng));
                if (u >= pd) continue;  // missed detection

                const Eigen::Matrix2d R_gen = tracking::measurement_covariance(ch, snr_true);
                const Eigen::Matrix2d L = Eigen::LLT<Eigen::Matrix2d>(R_gen).matrixL();
                Eigen::Vector2d z = tracking::bistatic_measure(truth, ch) + L * w;

                const tracking::MeasJacobian H =
                    tracking::measurement_jacobian(next.mean, ch);
                const double snr_flt = tracking::snr_at(next.mean, ch);
                const Eigen::Matrix2d R = tracking::measurement_covariance(ch, snr_flt);
                const Eigen::Vector2d innov = z - tracking::bistatic_measure(next.mean, ch);
                const Eigen::Matrix2d S = H * next.cov * H.transpose() + R;
                Eigen::LLT<Eigen::Matrix2d> sllt(S);
                if (sllt.info() != Eigen::Success)
                    throw NumericalError("innovation covariance is not invertible");
                const Eigen::Matrix<double, 4, 2> K =
                    next.cov * H.transpose() * sllt.solve(Eigen::Matrix2d::Identity());
                next.mean += K * innov;
                const Eigen::Matrix4d IKH = Eigen::Matrix4d::Identity() - K * H;
                Eigen::Matrix4d P = IKH * next.cov * IKH.transpose() + K * R * K.transpose();
                next.cov = 0.5 * (P + P.transpose());
            }
            belief = next;

            const Eigen::Vector2d err =
                tracking::position_of(belief.mean) - tracking::position_of(truth);
            sq_err[k] += err.squaredNorm();
            sum_n[k] += static_cast<double>(mode == SchedulerMode::ideal_set
                                                ? 0
                                                : dec.activated.size());
            sum_ach[k] += dec.achieved_trace;
            sum_ideal[k] += dec.ideal_trace;
        }
    }

    std::vector<SymbioticStepStats> out(steps);
    const double inv_trials = 1.0 / config.trials;
    for (std::size_t k = 0; k < steps; ++k) {
        out[k].step = static_cast<int>(k);
        out[k].rmse_pos_m = std::sqrt(sq_err[k] * inv_trials);
        out[k].mean_n = sum_n[k] * inv_trials;
        out[k].mean_trace_achieved = sum_ach[k] * inv_trials;
        out[k].mean_trace_ideal = sum_ideal[k] * inv_trials;
    }
    return out;
}

}  // namespace cograd::symbiotic
