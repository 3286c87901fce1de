#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cograd/errors.hpp"
#include "cograd/rng.hpp"

namespace cograd::sensing {

/// Square-law energy detector over N_s complex Gaussian samples per slot.
/// Test statistic sum |sample|^2; under noise only it is distributed as
/// (noise_power/2) * chi-square with 2*N_s degrees of freedom, and with a
/// constant-amplitude signal of power P it becomes noncentral with
/// noncentrality 2*N_s*P/noise_power.
struct EnergyDetector {
    int n_samples = 16;
    double noise_power = 1.0;  // E|sample|^2 under noise only, linear watts
    double pfa = 0.1;          // design false-alarm probability
    double threshold = 0.0;    // linear energy units

    /// Builds a detector whose threshold is solved from the chi-square
    /// tail by bisection (probability tolerance 1e-10).
    static EnergyDetector from_pfa(int n_samples, double noise_power, double pfa);
};

/// One slot decision: 1 iff the energy statistic exceeds the threshold.
/// `signal_power` is the per-sample signal power in the slot (0 when the
/// channel is free).
int detect(const EnergyDetector& det, double signal_power, Rng& rng);

/// Detection probability at the given per-sample SNR (signal_power /
/// noise_power), from the noncentral chi-square tail of the same
/// statistic model `detect` samples from.
double detection_probability(const EnergyDetector& det, double snr);

/// Emission matrix implied by the detector's operating point:
/// column 0 = free channel (false-alarm column), column 1 = busy channel
/// at the given SNR. Column-stochastic.
Eigen::Matrix2d roc_to_emission(const EnergyDetector& det, double snr);

/// Regulatory spectral envelope: flat 0 dB inside [f_lo, f_hi], dropping
/// to `floor_db` at the band edge, then `rolloff_db_per_decade` per
/// decade of the ratio of distance from the band, measured as
/// log10(f / f_hi) above the band and log10(f_lo / f) below it.
struct EmissionMask {
    double f_lo = 0.0;
    double f_hi = 0.0;
    double floor_db = -40.0;
    double rolloff_db_per_decade = -20.0;

    void validate() const;

    /// Allowed level (dB relative to peak) at frequency f.
    double envelope_db(double f) const;
};

using SpectrumSample = std::pair<double, double>;  // (frequency Hz, dB rel peak)

/// Returns the frequencies of all samples strictly above the mask
/// envelope (empty = pass). Boundary is inclusive: a sample exactly on
/// the envelope passes. Throws InvalidInput on an empty or unsorted
/// spectrum.
std::vector<double> check_emission_mask(const std::vector<SpectrumSample>& spectrum,
                                        const EmissionMask& mask);

// Distribution tails used by the detector model; exposed for reuse.

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// Survival function of the chi-square distribution with k dof.
double chi2_sf(double x, double k);

/// Survival function of the noncentral chi-square distribution with k
/// dof and noncentrality nc.
double noncentral_chi2_sf(double x, double k, double nc);

}  // namespace cograd::sensing
