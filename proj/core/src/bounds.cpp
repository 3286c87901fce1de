#include "cograd/bounds.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "cograd/errors.hpp"

namespace cograd::bounds {

Eigen::Matrix4d FisherInfo::pcrlb() const {
    Eigen::FullPivLU<Eigen::Matrix4d> lu(J);
    if (!lu.isInvertible())
        throw NumericalError("Fisher information matrix is singular");
    return lu.inverse();
}

FisherInfo fim_init(const Eigen::Matrix4d& prior_covariance) {
    Eigen::LLT<Eigen::Matrix4d> llt(prior_covariance);
    if (llt.info() != Eigen::Success)
        throw InvalidInput("prior covariance is not positive definite");
    FisherInfo fi;
    fi.J = llt.solve(Eigen::Matrix4d::Identity());
    fi.J = 0.5 * (fi.J + fi.J.transpose());
    return fi;
}

FisherInfo fim_step(const FisherInfo& J, const MotionModel& model,
                    const MeasJacobian& H, const Eigen::Matrix2d& R, double pd) {
    if (pd < 0.0 || pd > 1.0) throw InvalidInput("P_D must lie in [0,1]");
    Eigen::FullPivLU<Eigen::Matrix4d> lu(model.F);
    if (!lu.isInvertible()) throw InvalidInput("transition matrix F is singular");
    const Eigen::Matrix4d Finv = lu.inverse();

    Eigen::LLT<Eigen::Matrix2d> llt(R);
    if (llt.info() != Eigen::Success)
        throw InvalidInput("measurement covariance is not positive definite");
    const Eigen::Matrix2d Rinv = llt.solve(Eigen::Matrix2d::Identity());

    FisherInfo next;
    next.J = Finv.transpose() * J.J * Finv + pd * H.transpose() * Rinv * H;
    next.J = 0.5 * (next.J + next.J.transpose());
    return next;
}

ChannelInfoMetric channel_metric(const BistaticChannel& ch, const State& state) {
    const double snr = tracking::snr_at(state, ch);
    const Eigen::Matrix2d R = tracking::measurement_covariance(ch, snr);

    Eigen::LLT<Eigen::Matrix2d> llt(R);
    if (llt.info() != Eigen::Success)
        throw NumericalError("measurement covariance lost positive definiteness");
    const Eigen::Matrix2d L = llt.matrixL();
    const double det_r = L(0, 0) * L(0, 0) * L(1, 1) * L(1, 1);

    ChannelInfoMetric m;
    m.channel_id = ch.id;
    m.pd = tracking::detection_probability(snr, ch.pfa);
    m.det_r_inv = 1.0 / det_r;
    m.score = m.pd * m.det_r_inv;
    return m;
}

int select_channel(std::span<const ChannelInfoMetric> metrics) {
    if (metrics.empty()) throw InvalidInput("no channel metrics to select from");
    const ChannelInfoMetric* best = &metrics[0];
    for (const auto& m : metrics.subspan(1)) {
        if (m.score > best->score ||
            (m.score == best->score && m.channel_id < best->channel_id))
            best = &m;
    }
    return best->channel_id;
}

namespace {

SelectionStep make_step(int step, int selected, const FisherInfo& fi,
                        std::vector<double> scores) {
    SelectionStep s;
    s.step = step;
    s.selected_channel = selected;
    s.info = fi;
    const Eigen::Matrix4d C = fi.pcrlb();
    s.sqrt_pcrlb_x = std::sqrt(C(0, 0));
    s.sqrt_pcrlb_y = std::sqrt(C(2, 2));
    s.scores = std::move(scores);
    return s;
}

}  // namespace

std::vector<SelectionStep>
fim_track_with_selection(const State& initial_state, const MotionModel& model,
                         const std::vector<BistaticChannel>& channels,
                         const Eigen::Matrix4d& prior_covariance, int steps) {
    if (channels.empty()) throw InvalidInput("at least one channel required");
    if (steps < 1) throw InvalidInput("steps must be >= 1");

    FisherInfo fi = fim_init(prior_covariance);
    State x = initial_state;
    std::vector<SelectionStep> out;
    out.reserve(static_cast<std::size_t>(steps));

    for (int k = 0; k < steps; ++k) {
        x = model.F * x;

        std::vector<ChannelInfoMetric> metrics;
        std::vector<double> scores;
        metrics.reserve(channels.size());
        for (const auto& ch : channels) {
            metrics.push_back(channel_metric(ch, x));
            scores.push_back(metrics.back().score);
        }
        const int winner = select_channel(metrics);

        const BistaticChannel* ch = nullptr;
        for (const auto& c : channels)
            if (c.id == winner) ch = &c;
        const double snr = tracking::snr_at(x, *ch);
        fi = fim_step(fi, model, tracking::measurement_jacobian(x, *ch),
                      tracking::measurement_covariance(*ch, snr),
                      tracking::detection_probability(snr, ch->pfa));

        out.push_back(make_step(k, winner, fi, std::move(scores)));
    }
    return out;
}

std::vector<SelectionStep>
fim_track_fixed(const State& initial_state, const MotionModel& model,
                const BistaticChannel& channel,
                const Eigen::Matrix4d& prior_covariance, int steps) {
    std::vector<BistaticChannel> one{channel};
    return fim_track_with_selection(initial_state, model, one, prior_covariance, steps);
}

}  // namespace cograd::bounds
