#include "cograd/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cograd::sensing {

namespace {

// Series expansion of P(a,x), valid for x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued-fraction expansion of Q(a,x), valid for x >= a+1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw InvalidInput("gamma_p requires a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double chi2_sf(double x, double k) {
    if (x <= 0.0) return 1.0;
    if (x < k / 2.0 + 1.0) return 1.0 - gamma_p_series(k / 2.0, x / 2.0);
    return gamma_q_cf(k / 2.0, x / 2.0);
}

double noncentral_chi2_sf(double x, double k, double nc) {
    if (nc < 0.0) throw InvalidInput("noncentrality must be >= 0");
    if (nc == 0.0) return chi2_sf(x, k);
    if (x <= 0.0) return 1.0;

    // Poisson mixture of central tails, summed over a window around the
    // Poisson mode (width 10 sigma covers the mass to ~1e-15).
    const double half_nc = nc / 2.0;
    const long mode = std::max(0L, static_cast<long>(half_nc));
    const long width = static_cast<long>(10.0 * std::sqrt(half_nc + 1.0)) + 20;
    const long j_lo = std::max(0L, mode - width);
    const long j_hi = mode + width;

    // If even the smallest dof in the window already has tail ~1, the
    // mixture is ~1 (large-noncentrality shortcut).
    if (chi2_sf(x, k + 2.0 * j_lo) >= 1.0 - 1e-13) return 1.0;

    double log_w = -half_nc + j_lo * std::log(half_nc) - std::lgamma(j_lo + 1.0);
    double total = 0.0;
    for (long j = j_lo; j <= j_hi; ++j) {
        const double w = std::exp(log_w);
        if (w > 0.0) total += w * chi2_sf(x, k + 2.0 * j);
        log_w += std::log(half_nc) - std::log(static_cast<double>(j + 1));
    }
    return std::min(total, 1.0);
}

EnergyDetector EnergyDetector::from_pfa(int n_samples, double noise_power, double pfa) {
    if (n_samples < 1) throw InvalidInput("n_samples must be >= 1");
    if (noise_power <= 0.0) throw InvalidInput("noise_power must be positive");
    if (pfa <= 0.0 || pfa >= 1.0) throw InvalidInput("pfa must lie in (0,1)");

    const double k = 2.0 * n_samples;
    // Solve chi2_sf(x, k) = pfa for the scaled statistic x by bisection.
    double lo = 0.0;
    double hi = k;
    while (chi2_sf(hi, k) > pfa) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_sf(mid, k) > pfa)
            lo = mid;
        else
            hi = mid;
        if (std::abs(chi2_sf(mid, k) - pfa) < 1e-10 && hi - lo < 1e-9 * k) break;
    }
    EnergyDetector det;
    det.n_samples = n_samples;
    det.noise_power = noise_power;
    det.pfa = pfa;
    det.threshold = 0.5 * (lo + hi) * noise_power / 2.0;
    return det;
}

int detect(const EnergyDetector& det, double signal_power, Rng& rng) {
    if (det.n_samples < 1) throw InvalidInput("n_samples must be >= 1");
    if (signal_power < 0.0) throw InvalidInput("signal_power must be >= 0");
    std::normal_distribution<double> noise(0.0, std::sqrt(det.noise_power / 2.0));
    const double amp = std::sqrt(signal_power);  // constant complex amplitude
    double energy = 0.0;
    for (int i = 0; i < det.n_samples; ++i) {
        const double re = amp + noise(rng);
        const double im = noise(rng);
        energy += re * re + im * im;
    }
    return energy > det.threshold ? 1 : 0;
}

double detection_probability(const EnergyDetector& det, double snr) {
    if (snr < 0.0) throw InvalidInput("snr must be >= 0");
    const double k = 2.0 * det.n_samples;
    const double x = 2.0 * det.threshold / det.noise_power;
    const double nc = 2.0 * det.n_samples * snr;
    return noncentral_chi2_sf(x, k, nc);
}

Eigen::Matrix2d roc_to_emission(const EnergyDetector& det, double snr) {
    const double pd = detection_probability(det, snr);
    Eigen::Matrix2d B;
    B << 1.0 - det.pfa, 1.0 - pd,
         det.pfa,       pd;
    return B;
}

void EmissionMask::validate() const {
    if (!(f_lo < f_hi)) throw InvalidInput("emission mask requires f_lo < f_hi");
    if (rolloff_db_per_decade > 0.0) throw InvalidInput("mask rolloff must be <= 0");
}

double EmissionMask::envelope_db(double f) const {
    if (f >= f_lo && f <= f_hi) return 0.0;
    double decades;
    if (f > f_hi)
        decades = std::log10(f / f_hi);
    else if (f > 0.0)
        decades = std::log10(f_lo / f);
    else
        return -std::numeric_limits<double>::infinity();
    return floor_db + rolloff_db_per_decade * decades;
}

std::vector<double> check_emission_mask(const std::vector<SpectrumSample>& spectrum,
                                        const EmissionMask& mask) {
    mask.validate();
    if (spectrum.empty()) throw InvalidInput("empty spectrum");
    if (!std::is_sorted(spectrum.begin(), spectrum.end(),
                        [](const auto& a, const auto& b) { return a.first < b.first; }))
        throw InvalidInput("spectrum samples must be sorted by frequency");

    std::vector<double> violations;
    for (const auto& [f, level_db] : spectrum) {
        if (level_db > mask.envelope_db(f)) violations.push_back(f);
    }
    return violations;
}

}  // namespace cograd::sensing
