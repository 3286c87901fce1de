#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "cograd/tracking.hpp"

namespace cograd::bounds {

using tracking::BistaticChannel;
using tracking::MeasJacobian;
using tracking::MotionModel;
using tracking::State;

/// Recursive Fisher information of the target state; inverse = PCRLB.
struct FisherInfo {
    Eigen::Matrix4d J = Eigen::Matrix4d::Zero();

    /// PCRLB matrix J^-1; throws NumericalError if J is singular.
    Eigen::Matrix4d pcrlb() const;
};

/// J0 = inverse of the initial state covariance.
FisherInfo fim_init(const Eigen::Matrix4d& prior_covariance);

/// J_{k+1} = F^-T J_k F^-1 + P_D H^T R^-1 H.
FisherInfo fim_step(const FisherInfo& J, const MotionModel& model,
                    const MeasJacobian& H, const Eigen::Matrix2d& R, double pd);

struct ChannelInfoMetric {
    int channel_id = 0;
    double pd = 0.0;
    double det_r_inv = 0.0;  // 1 / det(R), via Cholesky of R
    double score = 0.0;      // pd * det_r_inv
};

/// Measurement-information score of one channel at the given state.
ChannelInfoMetric channel_metric(const BistaticChannel& ch, const State& state);

/// Argmax of score; ties broken by lowest channel id.
int select_channel(std::span<const ChannelInfoMetric> metrics);

struct SelectionStep {
    int step = 0;
    int selected_channel = 0;
    FisherInfo info;
    double sqrt_pcrlb_x = 0.0;
    double sqrt_pcrlb_y = 0.0;
    std::vector<double> scores;  // one per channel, channel order
};

/// Runs the information recursion along a deterministic trajectory,
/// picking the highest-scoring channel at each step. H, R and P_D are
/// evaluated at the true state.
std::vector<SelectionStep>
fim_track_with_selection(const State& initial_state, const MotionModel& model,
                         const std::vector<BistaticChannel>& channels,
                         const Eigen::Matrix4d& prior_covariance, int steps);

/// Fixed-channel variant (the comparison baselines of the selector).
std::vector<SelectionStep>
fim_track_fixed(const State& initial_state, const MotionModel& model,
                const BistaticChannel& channel,
                const Eigen::Matrix4d& prior_covariance, int steps);

}  // namespace cograd::bounds
