#include "ringqfc/hom.hpp"
#include "ringqfc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ringqfc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void PhotonWavepacket::validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("PhotonWavepacket: gamma must be > 0");
    const double n2 = polarization[0] * polarization[0] + polarization[1] * polarization[1] +
                      polarization[2] * polarization[2];
    if (std::abs(n2 - 1.0) > 1e-12)
        throw std::invalid_argument("PhotonWavepacket: polarization must be a unit vector");
}

void CoincidenceProfile::validate() const {
    if (taus.size() != rates.size())
        throw std::invalid_argument("CoincidenceProfile: column length mismatch");
    if (taus.empty()) throw std::invalid_argument("CoincidenceProfile: empty profile");
    for (double r : rates)
        if (r < 0.0) throw std::invalid_argument("CoincidenceProfile: negative rate");
}

void DetectorModel::validate() const {
    if (!(jitter_fwhm > 0.0)) throw std::invalid_argument("DetectorModel: jitter_fwhm must be > 0");
    if (!(bin_width > 0.0)) throw std::invalid_argument("DetectorModel: bin_width must be > 0");
}

double DetectorModel::sigma() const { return jitter_fwhm / std::sqrt(8.0 * std::numbers::ln2); }

CoincidenceProfile coincidence_profile(const PhotonWavepacket &a, const PhotonWavepacket &b,
                                       const std::vector<double> &taus) {
    a.validate();
    b.validate();
    if (std::abs(a.gamma - b.gamma) > 1e-12 * std::max(a.gamma, b.gamma))
        throw UnsupportedConfigurationError("coincidence_profile: wavepackets must share gamma");
    const double g = a.gamma;
    const double dt = a.arrival_time - b.arrival_time;
    const double dw = a.center_freq - b.center_freq;
    const double dot = a.polarization[0] * b.polarization[0] + a.polarization[1] * b.polarization[1] +
                       a.polarization[2] * b.polarization[2];
    const double pol2 = dot * dot;

    CoincidenceProfile out;
    out.taus = taus;
    out.rates.resize(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const double tau = taus[i];
        const double direct = std::exp(-g * std::abs(tau - dt)) + std::exp(-g * std::abs(tau + dt));
        const double envelope = std::exp(-g * std::max(std::abs(tau), std::abs(dt)));
        double r = direct - 2.0 * envelope * std::cos(dw * tau) * pol2;
        if (r < -1e-12)
            throw std::logic_error("coincidence_profile: negative rate " + std::to_string(r));
        out.rates[i] = std::max(r, 0.0);
    }
    return out;
}

namespace {

double orth_rate(double g, double dt, double tau) {
    return std::exp(-g * std::abs(tau - dt)) + std::exp(-g * std::abs(tau + dt));
}

double par_rate(double g, double dt, double tau) {
    return orth_rate(g, dt, tau) - 2.0 * std::exp(-g * std::max(std::abs(tau), std::abs(dt)));
}

} // namespace

double visibility(double gamma, double delta_t) {
    if (!(gamma > 0.0)) throw std::invalid_argument("visibility: gamma must be > 0");
    const double dt = std::abs(delta_t);
    const double span = dt + 10.0 / gamma;
    constexpr int kN = 20001;

    double max_orth = 0.0, max_par = 0.0;
    for (int i = 0; i < kN; ++i) {
        const double tau = -span + 2.0 * span * i / (kN - 1);
        max_orth = std::max(max_orth, orth_rate(gamma, dt, tau));
        max_par = std::max(max_par, par_rate(gamma, dt, tau));
    }
    for (double tau : {0.0, dt, -dt}) {
        max_orth = std::max(max_orth, orth_rate(gamma, dt, tau));
        max_par = std::max(max_par, par_rate(gamma, dt, tau));
    }
    return (max_orth - max_par) / (max_orth + max_par);
}

namespace {

double uniform_spacing(const std::vector<double> &taus) {
    const double h = taus[1] - taus[0];
    for (std::size_t i = 1; i + 1 < taus.size(); ++i)
        if (std::abs(taus[i + 1] - taus[i] - h) > 1e-6 * h)
            throw std::invalid_argument("profile grid must be uniform");
    return h;
}

} // namespace

CoincidenceProfile jitter_convolve(const CoincidenceProfile &profile, const DetectorModel &det) {
    profile.validate();
    det.validate();
    if (profile.taus.size() < 2) throw std::invalid_argument("jitter_convolve: need >= 2 samples");
    const double h = uniform_spacing(profile.taus);
    const double sigma = det.sigma();

    const int k_half = std::max(1, static_cast<int>(std::ceil(6.0 * sigma / h)));
    std::vector<double> kernel(2 * k_half + 1);
    double ksum = 0.0;
    for (int k = -k_half; k <= k_half; ++k) {
        kernel[k + k_half] = std::exp(-0.5 * (k * h) * (k * h) / (sigma * sigma));
        ksum += kernel[k + k_half];
    }
    for (double &k : kernel) k /= ksum;

    const int n = static_cast<int>(profile.rates.size());
    CoincidenceProfile out;
    out.taus = profile.taus;
    out.rates.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = -k_half; k <= k_half; ++k) {
            const int j = i + k;
            if (j >= 0 && j < n) acc += kernel[k + k_half] * profile.rates[j];
        }
        out.rates[i] = acc;
    }
    return out;
}

CoincidenceProfile apply_detector(const CoincidenceProfile &profile, const DetectorModel &det,
                                  double accidental_floor) {
    profile.validate();
    det.validate();
    if (accidental_floor < 0.0)
        throw std::invalid_argument("apply_detector: accidental_floor must be >= 0");
    if (profile.taus.size() < 2) throw std::invalid_argument("apply_detector: need >= 2 samples");
    const double h = uniform_spacing(profile.taus);
    if (h > det.bin_width / 8.0 + 1e-18)
        throw AccuracyError("apply_detector: grid spacing must be <= bin_width / 8");

    CoincidenceProfile floored = profile;
    for (double &r : floored.rates) r += accidental_floor;
    const CoincidenceProfile conv = jitter_convolve(floored, det);

    // Each grid cell contributes rate * h to the bin holding its center.
    const double w = det.bin_width;
    const long k_lo = std::lround(conv.taus.front() / w);
    const long k_hi = std::lround(conv.taus.back() / w);
    CoincidenceProfile binned;
    binned.taus.resize(k_hi - k_lo + 1);
    binned.rates.assign(k_hi - k_lo + 1, 0.0);
    for (long k = k_lo; k <= k_hi; ++k) binned.taus[k - k_lo] = k * w;
    for (std::size_t i = 0; i < conv.taus.size(); ++i) {
        const long k = std::lround(conv.taus[i] / w);
        if (k >= k_lo && k <= k_hi) binned.rates[k - k_lo] += conv.rates[i] * h;
    }
    return binned;
}

std::vector<std::pair<double, CoincidenceProfile>>
beat_family(double gamma, const std::vector<double> &delta_fs, const DetectorModel &det,
            double accidental_floor) {
    if (!(gamma > 0.0)) throw std::invalid_argument("beat_family: gamma must be > 0");
    det.validate();

    const double h = det.bin_width / 32.0;
    const double span = std::ceil(8.0 / gamma / det.bin_width) * det.bin_width;
    std::vector<double> taus;
    for (double t = -span; t <= span + 0.5 * h; t += h) taus.push_back(t);

    std::vector<std::pair<double, CoincidenceProfile>> out;
    out.reserve(delta_fs.size());
    for (double df : delta_fs) {
        PhotonWavepacket a, b;
        a.gamma = b.gamma = gamma;
        a.center_freq = kTwoPi * df;
        b.center_freq = 0.0;
        const CoincidenceProfile pre = coincidence_profile(a, b, taus);
        out.emplace_back(df, apply_detector(pre, det, accidental_floor));
    }
    return out;
}

std::vector<std::pair<double, double>> visibility_sweep(double gamma,
                                                        const std::vector<double> &delta_ts,
                                                        const DetectorModel &det,
                                                        double accidental_floor) {
    if (!(gamma > 0.0)) throw std::invalid_argument("visibility_sweep: gamma must be > 0");
    det.validate();

    std::vector<std::pair<double, double>> out;
    out.reserve(delta_ts.size());
    for (double dt : delta_ts) {
        const double h = det.bin_width / 32.0;
        const double span =
            std::ceil((std::abs(dt) + 8.0 / gamma) / det.bin_width) * det.bin_width;
        std::vector<double> taus;
        for (double t = -span; t <= span + 0.5 * h; t += h) taus.push_back(t);

        PhotonWavepacket a, b;
        a.gamma = b.gamma = gamma;
        a.arrival_time = dt;
        const PhotonWavepacket b_perp = [&] {
            PhotonWavepacket p = b;
            p.polarization = {0, 1, 0};
            return p;
        }();
        const CoincidenceProfile par =
            apply_detector(coincidence_profile(a, b, taus), det, accidental_floor);
        const CoincidenceProfile perp =
            apply_detector(coincidence_profile(a, b_perp, taus), det, accidental_floor);
        const double max_par = *std::max_element(par.rates.begin(), par.rates.end());
        const double max_perp = *std::max_element(perp.rates.begin(), perp.rates.end());
        out.emplace_back(dt, (max_perp - max_par) / (max_perp + max_par));
    }
    return out;
}

} // namespace ringqfc
