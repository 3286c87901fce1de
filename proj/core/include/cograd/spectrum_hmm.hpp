#pragma once

#include <cstdint>
#include <deque>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cograd/errors.hpp"
#include "cograd/rng.hpp"

namespace cograd::spectrum {

/// Two-state occupancy model of a single frequency channel.
///
/// NOTE ON CONVENTION: A and B are COLUMN-stochastic,
///   A(h, k) = Pr[S_t = h | S_{t-1} = k],
///   B(h, k) = Pr[O_t = h | S_t = k].
/// State/observation 0 = channel free, 1 = channel busy. Consequently
/// B(1, 0) is the detector false-alarm probability and B(0, 1) the
/// missed-detection probability. Mind the transposition when importing
/// parameters from row-stochastic HMM code.
struct HmmModel {
    Eigen::Matrix2d A;
    Eigen::Matrix2d B;
    Eigen::Vector2d pi;
    Eigen::Vector2d gamma;  // filtered posterior for the latest slot

    /// Throws InvalidInput if any column sum is off 1 by more than 1e-9,
    /// any entry is outside [0,1], or pi does not sum to 1.
    void validate() const;

    static HmmModel uniform_prior(const Eigen::Matrix2d& B);
};

/// Sliding buffer of the last `capacity` detector outputs.
class ObservationWindow {
public:
    explicit ObservationWindow(std::size_t capacity);

    void push(int observation);
    std::size_t size() const { return buf_.size(); }
    std::size_t capacity() const { return capacity_; }
    const std::deque<std::uint8_t>& data() const { return buf_; }

private:
    std::size_t capacity_;
    std::deque<std::uint8_t> buf_;
};

enum class Decision { transmit, hold };
enum class ErrorEvent { none, e0, e1 };  // e0: held a free slot, e1: collided

struct DecisionRecord {
    long slot = 0;
    Decision decision = Decision::hold;
    int true_state = 0;
    ErrorEvent event = ErrorEvent::none;
};

/// Draws `slots` (state, observation) pairs from the model.
std::pair<std::vector<int>, std::vector<int>>
simulate_channel(const HmmModel& model, long slots, std::uint64_t seed);

/// One step of the (normalized) forward recursion:
///   gamma'(h) ~ B(obs, h) * sum_k A(h, k) gamma(k).
/// Throws NumericalError if the observation has zero likelihood.
void filter_update(HmmModel& model, int observation);

/// Eq.-style opportunity probability: gamma(0) A(0,0) + gamma(1) A(0,1).
double spectrum_opportunity(const HmmModel& model);

/// Strictly-greater threshold rule; a tie holds.
Decision transmit_decision(double p_so, double lambda);

inline ErrorEvent classify_event(Decision d, int true_state) {
    if (d == Decision::hold && true_state == 0) return ErrorEvent::e0;
    if (d == Decision::transmit && true_state == 1) return ErrorEvent::e1;
    return ErrorEvent::none;
}

struct BaumWelchResult {
    Eigen::Matrix2d A;
    Eigen::Vector2d pi;
    std::vector<double> log_likelihood;  // one entry per completed iteration
    int iterations = 0;
};

/// Re-estimates (A, pi) with B held fixed, using the scaled
/// forward-backward recursions. Warm-started from `init`. Stops after
/// `max_iters` iterations or when the log-likelihood improves by less
/// than `tol`. The log-likelihood sequence is non-decreasing (EM).
/// Throws InvalidInput if the window holds fewer than 2 observations.
BaumWelchResult baum_welch_update(const ObservationWindow& window,
                                  const Eigen::Matrix2d& B,
                                  const HmmModel& init,
                                  int max_iters = 20,
                                  double tol = 1e-6);

/// Clamps probabilities into [eps, 1-eps] and renormalizes columns.
/// Short windows can drive Baum-Welch estimates to absorbing states;
/// clamped values keep the opportunity probability responsive.
Eigen::Matrix2d clamp_stochastic(const Eigen::Matrix2d& A, double eps = 1e-6);

}  // namespace cograd::spectrum
