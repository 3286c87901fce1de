#include "cograd/spectrum_hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cograd::spectrum {

namespace {

void check_column_stochastic(const Eigen::Matrix2d& M, const char* name) {
    for (int k = 0; k < 2; ++k) {
        double sum = 0.0;
        for (int h = 0; h < 2; ++h) {
            const double v = M(h, k);
            if (v < 0.0 || v > 1.0)
                throw InvalidInput(std::string(name) + " has an entry outside [0,1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw InvalidInput(std::string(name) + " column " + std::to_string(k) +
                               " sums to " + std::to_string(sum));
    }
}

int draw2(double p0, Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p0 ? 0 : 1;
}

}  // namespace

void HmmModel::validate() const {
    check_column_stochastic(A, "A");
    check_column_stochastic(B, "B");
    if (std::abs(pi.sum() - 1.0) > 1e-9 || pi.minCoeff() < 0.0)
        throw InvalidInput("pi is not a distribution");
    if (std::abs(gamma.sum() - 1.0) > 1e-9 || gamma.minCoeff() < 0.0)
        throw InvalidInput("gamma is not a distribution");
}

HmmModel HmmModel::uniform_prior(const Eigen::Matrix2d& B) {
    HmmModel m;
    m.A << 0.5, 0.5, 0.5, 0.5;
    m.B = B;
    m.pi << 0.5, 0.5;
    m.gamma = m.pi;
    return m;
}

ObservationWindow::ObservationWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw InvalidInput("observation window capacity must be positive");
}

void ObservationWindow::push(int observation) {
    if (observation != 0 && observation != 1)
        throw InvalidInput("observation must be 0 or 1");
    if (buf_.size() == capacity_) buf_.pop_front();
    buf_.push_back(static_cast<std::uint8_t>(observation));
}

std::pair<std::vector<int>, std::vector<int>>
simulate_channel(const HmmModel& model, long slots, std::uint64_t seed) {
    model.validate();
    if (slots < 1) throw InvalidInput("slots must be >= 1");

    Rng rng = make_rng(seed);
    std::vector<int> states(static_cast<std::size_t>(slots));
    std::vector<int> observations(static_cast<std::size_t>(slots));

    int s = draw2(model.pi(0), rng);
    for (long t = 0; t < slots; ++t) {
        if (t > 0) s = draw2(model.A(0, s), rng);
        states[static_cast<std::size_t>(t)] = s;
        observations[static_cast<std::size_t>(t)] = draw2(model.B(0, s), rng);
    }
    return {std::move(states), std::move(observations)};
}

void filter_update(HmmModel& model, int observation) {
    if (observation != 0 && observation != 1)
        throw InvalidInput("observation must be 0 or 1");
    Eigen::Vector2d predicted = model.A * model.gamma;
    Eigen::Vector2d unnorm;
    unnorm(0) = model.B(observation, 0) * predicted(0);
    unnorm(1) = model.B(observation, 1) * predicted(1);
    const double total = unnorm.sum();
    if (total <= 0.0)
        throw NumericalError("observation has zero likelihood under the model");
    model.gamma = unnorm / total;
}

double spectrum_opportunity(const HmmModel& model) {
    return model.gamma(0) * model.A(0, 0) + model.gamma(1) * model.A(0, 1);
}

Decision transmit_decision(double p_so, double lambda) {
    if (p_so < 0.0 || p_so > 1.0 || lambda < 0.0 || lambda > 1.0)
        throw InvalidInput("p_so and lambda must lie in [0,1]");
    return p_so > lambda ? Decision::transmit : Decision::hold;
}

Eigen::Matrix2d clamp_stochastic(const Eigen::Matrix2d& A, double eps) {
    Eigen::Matrix2d C;
    for (int k = 0; k < 2; ++k) {
        double a = std::clamp(A(0, k), eps, 1.0 - eps);
        double b = std::clamp(A(1, k), eps, 1.0 - eps);
        const double s = a + b;
        C(0, k) = a / s;
        C(1, k) = b / s;
    }
    return C;
}

BaumWelchResult baum_welch_update(const ObservationWindow& window,
                                  const Eigen::Matrix2d& B,
                                  const HmmModel& init,
                                  int max_iters,
                                  double tol) {
    const auto& obs = window.data();
    const std::size_t T = obs.size();
    if (T < 2) throw InvalidInput("Baum-Welch needs at least 2 observations");
    check_column_stochastic(B, "B");
    if (max_iters < 1) throw InvalidInput("max_iters must be >= 1");

    // b[t][h] = Pr[O_t | S_t = h]
    std::vector<double> b0(T), b1(T);
    {
        std::size_t t = 0;
        for (auto o : obs) {
            b0[t] = B(o, 0);
            b1[t] = B(o, 1);
            ++t;
        }
    }

    double a00 = init.A(0, 0), a10 = init.A(1, 0);
    double a01 = init.A(0, 1), a11 = init.A(1, 1);
    double p0 = init.pi(0), p1 = init.pi(1);

    std::vector<double> alpha0(T), alpha1(T), scale(T);
    std::vector<double> beta0(T), beta1(T);

    // Scaled forward pass; returns the log-likelihood.
    auto forward = [&]() -> double {
        double ll = 0.0;
        double f0 = p0 * b0[0];
        double f1 = p1 * b1[0];
        double c = f0 + f1;
        if (c <= 0.0) throw NumericalError("zero likelihood in forward pass");
        alpha0[0] = f0 / c;
        alpha1[0] = f1 / c;
        scale[0] = c;
        ll += std::log(c);
        for (std::size_t t = 1; t < T; ++t) {
            f0 = (a00 * alpha0[t - 1] + a01 * alpha1[t - 1]) * b0[t];
            f1 = (a10 * alpha0[t - 1] + a11 * alpha1[t - 1]) * b1[t];
            c = f0 + f1;
            if (c <= 0.0) throw NumericalError("zero likelihood in forward pass");
            alpha0[t] = f0 / c;
            alpha1[t] = f1 / c;
            scale[t] = c;
            ll += std::log(c);
        }
        return ll;
    };

    BaumWelchResult result;
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (int it = 0; it < max_iters; ++it) {
        const double ll = forward();
        if (it > 0 && ll - prev_ll < tol) break;  // converged; keep previous estimate
        prev_ll = ll;

        // Scaled backward pass (same scale factors as forward).
        beta0[T - 1] = 1.0;
        beta1[T - 1] = 1.0;
        for (std::size_t t = T - 1; t-- > 0;) {
            const double g0 = b0[t + 1] * beta0[t + 1];
            const double g1 = b1[t + 1] * beta1[t + 1];
            beta0[t] = (a00 * g0 + a10 * g1) / scale[t + 1];
            beta1[t] = (a01 * g0 + a11 * g1) / scale[t + 1];
        }

        // Accumulate expected transition counts xi and state counts.
        double n00 = 0.0, n10 = 0.0, n01 = 0.0, n11 = 0.0;
        for (std::size_t t = 0; t + 1 < T; ++t) {
            const double g0 = b0[t + 1] * beta0[t + 1];
            const double g1 = b1[t + 1] * beta1[t + 1];
            const double inv_c = 1.0 / scale[t + 1];
            n00 += alpha0[t] * a00 * g0 * inv_c;
            n10 += alpha0[t] * a10 * g1 * inv_c;
            n01 += alpha1[t] * a01 * g0 * inv_c;
            n11 += alpha1[t] * a11 * g1 * inv_c;
        }

        const double from0 = n00 + n10;
        const double from1 = n01 + n11;
        if (from0 > 0.0) { a00 = n00 / from0; a10 = n10 / from0; }
        if (from1 > 0.0) { a01 = n01 / from1; a11 = n11 / from1; }

        const double g0 = alpha0[0] * beta0[0];
        const double g1 = alpha1[0] * beta1[0];
        const double gs = g0 + g1;
        if (gs > 0.0) { p0 = g0 / gs; p1 = g1 / gs; }

        result.log_likelihood.push_back(ll);
        result.iterations = it + 1;
    }

    result.A << a00, a01, a10, a11;
    result.pi << p0, p1;
    return result;
}

}  // namespace cograd::spectrum
