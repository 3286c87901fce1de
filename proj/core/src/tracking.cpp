#include "cograd/tracking.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace cograd::tracking {

namespace {

constexpr double kMinRange = 1e-6;

struct Leg {
    Eigen::Vector2d u;  // unit vector from the site to the target
    double rho;         // distance
};

Leg leg_to(const State& state, const Eigen::Vector2d& site) {
    const Eigen::Vector2d d = position_of(state) - site;
    const double rho = d.norm();
    if (rho < kMinRange)
        throw InvalidInput("target coincides with a transmitter or receiver");
    return {d / rho, rho};
}

}  // namespace

MotionModel MotionModel::constant_velocity(double dt, double accel_noise_psd) {
    if (dt <= 0.0) throw InvalidInput("dt must be positive");
    MotionModel m;
    m.dt = dt;
    m.F << 1, dt, 0, 0,
           0, 1,  0, 0,
           0, 0,  1, dt,
           0, 0,  0, 1;
    if (accel_noise_psd > 0.0) {
        const double q = accel_noise_psd;
        Eigen::Matrix2d blk;
        blk << dt * dt * dt / 3.0, dt * dt / 2.0,
               dt * dt / 2.0,      dt;
        blk *= q;
        m.Q.setZero();
        m.Q.block<2, 2>(0, 0) = blk;
        m.Q.block<2, 2>(2, 2) = blk;
    }
    return m;
}

void BistaticChannel::validate() const {
    if ((tx - rx).norm() < kMinRange)
        throw InvalidInput("transmitter and receiver positions coincide");
    if (wavelength <= 0.0) throw InvalidInput("wavelength must be positive");
    if (ref_snr <= 0.0 || ref_range_product <= 0.0)
        throw InvalidInput("reference SNR calibration must be positive");
    if (pfa <= 0.0 || pfa >= 1.0) throw InvalidInput("pfa must lie in (0,1)");
    Eigen::LLT<Eigen::Matrix2d> llt(r0);
    if (llt.info() != Eigen::Success)
        throw InvalidInput("base measurement covariance is not positive definite");
}

Eigen::Vector2d bistatic_measure(const State& state, const BistaticChannel& ch) {
    const Leg lt = leg_to(state, ch.tx);
    const Leg lr = leg_to(state, ch.rx);
    const Eigen::Vector2d vel = velocity_of(state);
    const double r = lt.rho + lr.rho;
    const double v = lt.u.dot(vel) + lr.u.dot(vel);
    return {r, v};
}

MeasJacobian measurement_jacobian(const State& state, const BistaticChannel& ch) {
    const Leg lt = leg_to(state, ch.tx);
    const Leg lr = leg_to(state, ch.rx);
    const Eigen::Vector2d vel = velocity_of(state);

    const Eigen::Vector2d dr_dp = lt.u + lr.u;
    // d(u . v)/dp = (I - u u^T) v / rho for each leg.
    const Eigen::Vector2d dv_dp =
        (vel - lt.u * lt.u.dot(vel)) / lt.rho +
        (vel - lr.u * lr.u.dot(vel)) / lr.rho;

    MeasJacobian H;
    //      x         vx        y         vy
    H << dr_dp(0), 0.0,      dr_dp(1), 0.0,
         dv_dp(0), dr_dp(0), dv_dp(1), dr_dp(1);
    return H;
}

double snr_at(const State& state, const BistaticChannel& ch) {
    const Leg lt = leg_to(state, ch.tx);
    const Leg lr = leg_to(state, ch.rx);
    const double ratio = ch.ref_range_product / (lt.rho * lr.rho);
    return ch.ref_snr * ratio * ratio;
}

double detection_probability(double snr, double pfa) {
    if (snr < 0.0) throw InvalidInput("snr must be >= 0");
    if (pfa <= 0.0 || pfa >= 1.0) throw InvalidInput("pfa must lie in (0,1)");
    return std::pow(pfa, 1.0 / (1.0 + snr));
}

Eigen::Matrix2d measurement_covariance(const BistaticChannel& ch, double snr) {
    if (snr <= 0.0) throw InvalidInput("snr must be positive");
    return ch.r0 * (ch.ref_snr / snr);
}

bool in_beam(const Eigen::Vector2d& rx, const Eigen::Vector2d& steer,
             const Eigen::Vector2d& target, double hpbw_rad) {
    const Eigen::Vector2d ds = steer - rx;
    const Eigen::Vector2d dt = target - rx;
    if (ds.norm() < kMinRange || dt.norm() < kMinRange) return true;
    const double cosang = ds.normalized().dot(dt.normalized());
    return std::acos(std::min(1.0, std::max(-1.0, cosang))) <= hpbw_rad / 2.0;
}

bool is_spd(const Eigen::MatrixXd& m, double sym_tol) {
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > sym_tol) return false;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    return llt.info() == Eigen::Success;
}

TrackBelief ekf_step(const TrackBelief& belief, const MotionModel& model,
                     const BistaticChannel& ch, const Measurement& meas) {
    TrackBelief next;
    next.pred_mean = model.F * belief.mean;
    next.pred_cov = model.F * belief.cov * model.F.transpose() + model.Q;
    next.pred_cov = 0.5 * (next.pred_cov + next.pred_cov.transpose());

    if (!meas.valid) {
        next.mean = next.pred_mean;
        next.cov = next.pred_cov;
        return next;
    }

    const MeasJacobian H = measurement_jacobian(next.pred_mean, ch);
    const double snr = snr_at(next.pred_mean, ch);
    const Eigen::Matrix2d R = measurement_covariance(ch, snr);

    const Eigen::Vector2d z_pred = bistatic_measure(next.pred_mean, ch);
    const Eigen::Vector2d innov = meas.z - z_pred;
    const Eigen::Matrix2d S = H * next.pred_cov * H.transpose() + R;
    Eigen::LLT<Eigen::Matrix2d> llt(S);
    if (llt.info() != Eigen::Success)
        throw NumericalError("innovation covariance is not invertible");

    const Eigen::Matrix<double, 4, 2> K =
        next.pred_cov * H.transpose() * llt.solve(Eigen::Matrix2d::Identity());

    next.mean = next.pred_mean + K * innov;
    const Eigen::Matrix4d IKH = Eigen::Matrix4d::Identity() - K * H;
    Eigen::Matrix4d P = IKH * next.pred_cov * IKH.transpose() + K * R * K.transpose();
    next.cov = 0.5 * (P + P.transpose());
    return next;
}

}  // namespace cograd::tracking
