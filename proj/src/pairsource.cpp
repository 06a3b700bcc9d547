#include "ringqfc/pairsource.hpp"
#include "ringqfc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace ringqfc {

void PairSourceModel::validate() const {
    if (pair_coeff < 0.0 || raman_coeff < 0.0)
        throw std::invalid_argument("PairSourceModel: coefficients must be >= 0");
    if (!(eta_s > 0.0) || eta_s > 1.0 || !(eta_i > 0.0) || eta_i > 1.0)
        throw std::invalid_argument("PairSourceModel: eta must be in (0, 1]");
    if (dk_s < 0.0 || dk_i < 0.0)
        throw std::invalid_argument("PairSourceModel: dark counts must be >= 0");
    if (!(tau_b > 0.0)) throw std::invalid_argument("PairSourceModel: tau_b must be > 0");
}

void NoiseBudget::validate() const {
    if (converted_fraction_signal < 0.0 || converted_fraction_signal > 1.0 ||
        passed_fraction_noise < 0.0 || passed_fraction_noise > 1.0)
        throw std::invalid_argument("NoiseBudget: fractions must be in [0, 1]");
    if (converter_noise < 0.0)
        throw std::invalid_argument("NoiseBudget: converter_noise must be >= 0");
}

CountsDecomposition decompose_counts(const std::vector<double> &powers_mw,
                                     const std::vector<double> &counts_per_s) {
    if (powers_mw.size() != counts_per_s.size())
        throw std::invalid_argument("decompose_counts: column length mismatch");
    std::set<double> distinct(powers_mw.begin(), powers_mw.end());
    if (distinct.size() < 3)
        throw InsufficientDataError("decompose_counts: need at least 3 distinct powers, got " +
                                    std::to_string(distinct.size()));

    double s2 = 0, s3 = 0, s4 = 0, c1 = 0, c2 = 0;
    for (std::size_t i = 0; i < powers_mw.size(); ++i) {
        const double p = powers_mw[i], c = counts_per_s[i];
        s2 += p * p;
        s3 += p * p * p;
        s4 += p * p * p * p;
        c1 += c * p;
        c2 += c * p * p;
    }
    const double det = s2 * s4 - s3 * s3;
    if (det <= 0.0) throw SingularFitError("decompose_counts: degenerate power grid");

    CountsDecomposition out;
    out.raman_coeff = (c1 * s4 - c2 * s3) / det;
    out.pair_coeff = (c2 * s2 - c1 * s3) / det;
    if (out.raman_coeff < 0.0) {
        out.raman_coeff = 0.0;
        out.pair_coeff = std::max(0.0, c2 / s4);
        out.clamped = true;
    } else if (out.pair_coeff < 0.0) {
        out.pair_coeff = 0.0;
        out.raman_coeff = std::max(0.0, c1 / s2);
        out.clamped = true;
    }
    out.residuals.resize(powers_mw.size());
    for (std::size_t i = 0; i < powers_mw.size(); ++i) {
        const double p = powers_mw[i];
        out.residuals[i] = counts_per_s[i] - out.raman_coeff * p - out.pair_coeff * p * p;
    }
    return out;
}

double snr_before(const PairSourceModel &model, double power_mw) {
    model.validate();
    if (power_mw < 0.0) throw std::invalid_argument("snr_before: power must be >= 0");
    if (model.raman_coeff == 0.0) return power_mw == 0.0 ? 0.0 : snr_infinity();
    return model.pair_coeff / model.raman_coeff * power_mw;
}

double snr_after(const NoiseBudget &budget, double signal_flux, double input_noise) {
    budget.validate();
    if (signal_flux < 0.0 || input_noise < 0.0)
        throw std::invalid_argument("snr_after: fluxes must be >= 0");
    const double den = budget.passed_fraction_noise * input_noise + budget.converter_noise;
    if (den == 0.0) return snr_infinity();
    return budget.converted_fraction_signal * signal_flux / den;
}

CoincidenceRates coincidence_rates(const PairSourceModel &model, double gamma_e) {
    model.validate();
    if (gamma_e < 0.0) throw std::invalid_argument("coincidence_rates: gamma_e must be >= 0");
    CoincidenceRates r;
    r.cp = gamma_e * model.eta_s * model.eta_i * model.tau_b;
    r.ca = (gamma_e * model.eta_s + model.dk_s) * (gamma_e * model.eta_i + model.dk_i) *
           model.tau_b * model.tau_b;
    return r;
}

double car(const PairSourceModel &model, double gamma_e, double snr_s, double snr_i) {
    model.validate();
    if (!(gamma_e > 0.0)) throw std::domain_error("car: undefined for gamma_e = 0");
    if (!(snr_s > 0.0) || !(snr_i > 0.0)) throw std::invalid_argument("car: SNRs must be > 0");
    return 1.0 / (gamma_e * model.tau_b) / ((1.0 + 1.0 / snr_s) * (1.0 + 1.0 / snr_i));
}

double car_degradation(double snr_b, double snr_a) {
    if (!(snr_b > 0.0) || !(snr_a > 0.0))
        throw std::invalid_argument("car_degradation: SNRs must be > 0");
    return (1.0 + 1.0 / snr_b) / (1.0 + 1.0 / snr_a);
}

SpectralDensity filter_chain(const SpectralDensity &noise_in, const std::vector<FilterStage> &stages) {
    if (stages.empty()) throw std::invalid_argument("filter_chain: need at least one stage");
    if (noise_in.detuning_hz.size() != noise_in.density.size())
        throw std::invalid_argument("filter_chain: column length mismatch");
    SpectralDensity out = noise_in;
    for (const auto &st : stages) {
        if (!(st.bandwidth_hz > 0.0) || st.transmission < 0.0 || st.transmission > 1.0)
            throw std::invalid_argument("filter_chain: invalid stage");
        for (std::size_t i = 0; i < out.density.size(); ++i) {
            const bool inband = std::abs(out.detuning_hz[i] - st.center_hz) <= 0.5 * st.bandwidth_hz;
            out.density[i] *= inband ? st.transmission : 0.0;
        }
    }
    return out;
}

namespace {

// Deterministic samplers over a fixed 64-bit stream; the standard library's
// distributions are implementation-defined and would break byte reproducibility.
struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double u01() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
    double exponential(double rate) { return -std::log1p(-u01()) / rate; }
    double laplace(double rate) {
        const double u = u01();
        return u < 0.5 ? std::log(2.0 * u) / rate : -std::log(2.0 * (1.0 - u)) / rate;
    }
    bool bernoulli(double p) { return u01() < p; }
};

void append_dark_counts(Rng &rng, double rate, double duration, std::vector<double> &times) {
    if (rate <= 0.0) return;
    double t = rng.exponential(rate);
    while (t < duration) {
        times.push_back(t);
        t += rng.exponential(rate);
    }
}

} // namespace

McResult monte_carlo_coincidences(const PairSourceModel &model, double gamma_e, double duration_s,
                                  std::uint64_t seed, const McOptions &opts) {
    model.validate();
    if (gamma_e < 0.0) throw std::invalid_argument("monte_carlo_coincidences: gamma_e must be >= 0");
    if (!(duration_s > 0.0))
        throw std::invalid_argument("monte_carlo_coincidences: duration must be > 0");
    if (!(opts.pair_delay_rate > 0.0))
        throw std::invalid_argument("monte_carlo_coincidences: pair_delay_rate must be > 0");

    Rng rng(seed);
    std::vector<double> arm_a, arm_b; // signal/idler arms (or the two split halves)

    const double eta_a = opts.self_correlation ? model.eta_i : model.eta_s;
    if (gamma_e > 0.0) {
        arm_a.reserve(static_cast<std::size_t>(gamma_e * duration_s * eta_a * 1.1) + 16);
        arm_b.reserve(arm_a.capacity());
        auto emit_pair = [&](double t_birth) {
            if (opts.self_correlation) {
                if (!rng.bernoulli(model.eta_i)) return;
                (rng.bernoulli(0.5) ? arm_a : arm_b).push_back(t_birth);
            } else {
                const bool keep_s = rng.bernoulli(model.eta_s);
                const bool keep_i = rng.bernoulli(model.eta_i);
                if (keep_s) arm_a.push_back(t_birth);
                if (keep_i) arm_b.push_back(t_birth + rng.laplace(opts.pair_delay_rate));
            }
        };
        if (opts.thermal_bunching) {
            // Pairs arrive in coherence cells of length 1/gamma with a
            // Bose-Einstein cell occupancy: cell rate gamma_e/(1+lambda),
            // geometric count per occupied cell, uniform placement inside.
            const double tau_c = 1.0 / opts.pair_delay_rate;
            const double lambda = gamma_e * tau_c;
            const double q = lambda / (1.0 + lambda);
            const double cell_rate = gamma_e / (1.0 + lambda);
            double t = rng.exponential(cell_rate);
            while (t < duration_s) {
                int n = 1;
                if (q > 0.0) n = 1 + static_cast<int>(std::log1p(-rng.u01()) / std::log(q));
                for (int k = 0; k < n; ++k) emit_pair(t + rng.u01() * tau_c);
                t += rng.exponential(cell_rate);
            }
        } else {
            double t = rng.exponential(gamma_e);
            while (t < duration_s) {
                emit_pair(t);
                t += rng.exponential(gamma_e);
            }
        }
    }
    append_dark_counts(rng, model.dk_s, duration_s, arm_a);
    append_dark_counts(rng, model.dk_i, duration_s, arm_b);
    std::sort(arm_a.begin(), arm_a.end());
    std::sort(arm_b.begin(), arm_b.end());

    const int k_half = opts.histogram_halfwidth_bins;
    const double window = (k_half + 0.5) * model.tau_b;
    std::vector<std::uint64_t> hist(2 * k_half + 1, 0);
    std::size_t j0 = 0;
    for (const double ts : arm_a) {
        while (j0 < arm_b.size() && arm_b[j0] < ts - window) ++j0;
        for (std::size_t j = j0; j < arm_b.size() && arm_b[j] < ts + window; ++j) {
            const int k = static_cast<int>(std::lround((arm_b[j] - ts) / model.tau_b));
            if (k >= -k_half && k <= k_half) ++hist[k + k_half];
        }
    }

    // Accidental floor from bins outside the guard region around tau = 0.
    double far_sum = 0.0;
    int far_n = 0;
    for (int k = -k_half; k <= k_half; ++k) {
        if (std::abs(k) <= opts.accidental_guard_bins) continue;
        far_sum += static_cast<double>(hist[k + k_half]);
        ++far_n;
    }
    if (far_n == 0) throw std::invalid_argument("monte_carlo_coincidences: no accidental bins left");
    const double floor_mean = far_sum / far_n;
    const double n_peak = static_cast<double>(hist[k_half]);

    McResult r;
    r.ca_hat = floor_mean / duration_s;
    r.ca_sigma = std::sqrt(std::max(far_sum, 1.0)) / far_n / duration_s;
    r.cp_hat = (n_peak - floor_mean) / duration_s;
    r.cp_sigma = std::sqrt(std::max(n_peak, 1.0) + floor_mean / far_n) / duration_s;
    r.car_peak_over_floor = floor_mean > 0.0 ? n_peak / floor_mean : 0.0;
    r.underpowered = gamma_e * model.eta_s * model.eta_i * duration_s < 1e4;
    r.tau_s.resize(hist.size());
    for (int k = -k_half; k <= k_half; ++k) r.tau_s[k + k_half] = k * model.tau_b;
    r.coincidences = std::move(hist);
    return r;
}

} // namespace ringqfc
