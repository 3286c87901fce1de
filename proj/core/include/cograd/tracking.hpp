#pragma once

#include <string>

#include <Eigen/Core>

#include "cograd/errors.hpp"

namespace cograd::tracking {

using State = Eigen::Vector4d;       // [x, vx, y, vy]
using StateCov = Eigen::Matrix4d;
using MeasJacobian = Eigen::Matrix<double, 2, 4>;

inline Eigen::Vector2d position_of(const State& x) { return {x(0), x(2)}; }
inline Eigen::Vector2d velocity_of(const State& x) { return {x(1), x(3)}; }

/// Constant-velocity kinematics with time step dt.
struct MotionModel {
    Eigen::Matrix4d F = Eigen::Matrix4d::Identity();
    Eigen::Matrix4d Q = Eigen::Matrix4d::Zero();
    double dt = 1.0;

    static MotionModel constant_velocity(double dt,
                                         double accel_noise_psd = 0.0);
};

/// One transmitter of opportunity paired with the common receiver.
/// `r0` is the (range, bistatic velocity) measurement covariance at
/// `ref_snr`, which itself is specified at the bistatic range product
/// `ref_range_product` = R_tx_ref * R_rx_ref.
struct BistaticChannel {
    int id = 0;
    std::string waveform;
    Eigen::Vector2d tx = Eigen::Vector2d::Zero();
    Eigen::Vector2d rx = Eigen::Vector2d::Zero();
    double wavelength = 1.0;              // meters
    Eigen::Matrix2d r0 = Eigen::Matrix2d::Identity();
    double ref_snr = 1.0;                 // linear
    double ref_range_product = 1.0;       // m^2
    double pfa = 1e-4;

    void validate() const;
};

struct Measurement {
    bool valid = false;
    Eigen::Vector2d z = Eigen::Vector2d::Zero();  // [bistatic range, bistatic velocity]
};

struct TrackBelief {
    State mean = State::Zero();
    StateCov cov = StateCov::Identity();
    State pred_mean = State::Zero();
    StateCov pred_cov = StateCov::Identity();
};

/// Noiseless bistatic measurement: range sum ||p - tx|| + ||p - rx|| and
/// its time derivative (positive = increasing bistatic range).
Eigen::Vector2d bistatic_measure(const State& state, const BistaticChannel& ch);

/// Analytic 2x4 Jacobian of bistatic_measure w.r.t. [x, vx, y, vy].
MeasJacobian measurement_jacobian(const State& state, const BistaticChannel& ch);

/// Bistatic radar-equation SNR: ref_snr * (ref_range_product /
/// (R_tx * R_rx))^2.
double snr_at(const State& state, const BistaticChannel& ch);

/// Swerling-1 square-law detection curve: pfa^(1/(1+snr)).
double detection_probability(double snr, double pfa);

/// CRLB scaling of the measurement covariance: r0 * (ref_snr / snr).
Eigen::Matrix2d measurement_covariance(const BistaticChannel& ch, double snr);

/// True iff `target` lies within a beam of width `hpbw_rad` steered from
/// `rx` toward `steer`.
bool in_beam(const Eigen::Vector2d& rx, const Eigen::Vector2d& steer,
             const Eigen::Vector2d& target, double hpbw_rad);

/// EKF predict + (Joseph-form) update. H and R are evaluated at the
/// predicted mean; an invalid measurement leaves the posterior equal to
/// the prediction.
TrackBelief ekf_step(const TrackBelief& belief, const MotionModel& model,
                     const BistaticChannel& ch, const Measurement& meas);

/// Cholesky-based SPD check used by belief invariants and tests.
bool is_spd(const Eigen::MatrixXd& m, double sym_tol = 1e-10);

}  // namespace cograd::tracking
