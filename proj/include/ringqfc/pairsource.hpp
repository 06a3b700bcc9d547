#ifndef RINGQFC_PAIRSOURCE_HPP
#define RINGQFC_PAIRSOURCE_HPP

#include <cstdint>
#include <limits>
#include <vector>

namespace ringqfc {

// Pair-rate / noise-rate coefficients and the detection chain for CAR work.
// pair_coeff and raman_coeff describe on-chip rates (the channel efficiencies
// eta map them to the detection plane); dark counts live at the detectors.
struct PairSourceModel {
    double pair_coeff = 0.0;  // pairs/s per mW^2
    double raman_coeff = 0.0; // counts/s per mW (same plane as pair_coeff)
    double eta_s = 1.0;       // total signal-channel transmission, (0, 1]
    double eta_i = 1.0;       // total idler-channel transmission, (0, 1]
    double dk_s = 0.0;        // counts/s
    double dk_i = 0.0;        // counts/s
    double tau_b = 0.0;       // s, coincidence bin width

    void validate() const;
};

// Converter noise budget: fraction of the photon-pair signal that converts,
// fraction of in-band input noise that survives to the idler channel, and the
// converter's own added noise.
struct NoiseBudget {
    double converted_fraction_signal = 0.25;
    double passed_fraction_noise = 0.20;
    double converter_noise = 0.0; // counts/s at the detection plane

    void validate() const;
};

struct CountsDecomposition {
    double raman_coeff = 0.0; // linear coefficient a in counts ~ a P + b P^2
    double pair_coeff = 0.0;  // quadratic coefficient b
    std::vector<double> residuals;
    bool clamped = false; // unconstrained optimum had a negative coefficient
};

// Non-negative least squares split of detected counts into linear (Raman) and
// quadratic (pair) parts.
CountsDecomposition decompose_counts(const std::vector<double> &powers_mw,
                                     const std::vector<double> &counts_per_s);

// SNR before conversion at a common plane: (pair_coeff / raman_coeff) * P.
double snr_before(const PairSourceModel &model, double power_mw);

// SNR after conversion under the budget: f_sig * signal / (f_noise * input_noise + n_conv).
double snr_after(const NoiseBudget &budget, double signal_flux, double input_noise);

// Model coincidence quantities as written: Cp = gamma_e eta_s eta_i tau_b,
// Ca = (gamma_e eta_s + dk_s)(gamma_e eta_i + dk_i) tau_b^2. Only their ratio
// (the CAR) is dimensionless; divide by tau_b for per-second rates.
struct CoincidenceRates {
    double cp = 0.0;
    double ca = 0.0;
};
CoincidenceRates coincidence_rates(const PairSourceModel &model, double gamma_e);

// CAR = 1/(gamma_e tau_b) * 1/((1 + 1/snr_s)(1 + 1/snr_i)).
double car(const PairSourceModel &model, double gamma_e, double snr_s, double snr_i);

// (1 + 1/snr_before) / (1 + 1/snr_after).
double car_degradation(double snr_before, double snr_after);

// Sampled one-sided spectral density and ideal rectangular bandpass stages.
struct SpectralDensity {
    std::vector<double> detuning_hz;
    std::vector<double> density;
};
struct FilterStage {
    double bandwidth_hz = 0.0;
    double transmission = 1.0;
    double center_hz = 0.0;
};
SpectralDensity filter_chain(const SpectralDensity &noise_in, const std::vector<FilterStage> &stages);

// Event-stream oracle for Eqs.-level Cp/Ca/CAR.
struct McOptions {
    double pair_delay_rate = 4.021238596594935e9; // 1/s, intra-pair |t_i - t_s| decay (2 pi * 640 MHz)
    bool thermal_bunching = false;                 // Bose-Einstein pair number per coherence cell
    bool self_correlation = false;                 // split one arm 50/50 and correlate with itself
    int histogram_halfwidth_bins = 100;            // bins on each side of tau = 0
    int accidental_guard_bins = 20;                // bins around the peak excluded from the floor fit
};

struct McResult {
    double cp_hat = 0.0;        // counts/s, peak-bin excess over the accidental floor
    double ca_hat = 0.0;        // counts/s, accidental floor per bin
    double cp_sigma = 0.0;      // statistical standard error on cp_hat
    double ca_sigma = 0.0;      // statistical standard error on ca_hat
    double car_peak_over_floor = 0.0; // raw peak/floor ratio (self-correlation readout)
    bool underpowered = false;  // expected peak coincidences < 1e4
    std::vector<double> tau_s;  // histogram bin centers
    std::vector<std::uint64_t> coincidences;
};

McResult monte_carlo_coincidences(const PairSourceModel &model, double gamma_e, double duration_s,
                                  std::uint64_t seed, const McOptions &opts = {});

inline double snr_infinity() { return std::numeric_limits<double>::infinity(); }

} // namespace ringqfc

#endif
