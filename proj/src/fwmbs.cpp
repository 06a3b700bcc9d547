#include "ringqfc/fwmbs.hpp"
#include "ringqfc/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ringqfc {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
constexpr double kTwoPi = 2.0 * std::numbers::pi;
} // namespace

void FwmBsParams::validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("FwmBsParams: alpha must be > 0");
    if (!(theta > 0.0) || theta > 2.0 * alpha * (1.0 + 1e-12))
        throw std::invalid_argument("FwmBsParams: theta must satisfy 0 < theta <= 2 alpha");
    if (omega0_cpl < 0.0) throw std::invalid_argument("FwmBsParams: omega0_cpl must be >= 0");
    if (!(t_round > 0.0)) throw std::invalid_argument("FwmBsParams: t_round must be > 0");
}

void PumpConfig::validate() const {
    if (p1_power < 0.0 || p2_power < 0.0)
        throw std::invalid_argument("PumpConfig: pump powers must be >= 0");
    if (!(ring_length > 0.0)) throw std::invalid_argument("PumpConfig: ring_length must be > 0");
    pump_coupling.validate();
}

void SignalSpectrum::validate() const {
    if (shape != SpectrumShape::delta && !(fwhm > 0.0))
        throw std::invalid_argument("SignalSpectrum: fwhm must be > 0 for non-delta shapes");
}

double pump_intracavity(double power, double detuning, const ModeCoupling &mc) {
    if (power < 0.0) throw std::invalid_argument("pump_intracavity: power must be >= 0");
    const auto [alpha, theta] = coupling_rates(mc);
    const double dn = detuning * mc.t_round;
    return theta * power / (alpha * alpha + dn * dn);
}

double omega0_from_pumps(const PumpConfig &pc) {
    pc.validate();
    const double e1 = pump_intracavity(pc.p1_power, pc.p1_detuning, pc.pump_coupling);
    const double e2 = pump_intracavity(pc.p2_power, pc.p2_detuning, pc.pump_coupling);
    return 2.0 * pc.gamma_s * pc.ring_length * std::sqrt(e1 * e2);
}

namespace {

Mismatches mismatches_impl(const DispersionModel &disp, int mu, double separation, double t_round,
                           double xpm_term) {
    const int m = std::abs(mu);
    const double w_plus = resonance_frequency(disp, m);
    const double w_minus = resonance_frequency(disp, -m);
    const double w_zero = disp.omega0_ref;
    Mismatches out;
    out.omega1 = (0.5 * (w_plus - w_minus) - separation) * t_round - xpm_term;
    out.omega2 = 0.5 * (w_plus + w_minus - 2.0 * w_zero) * t_round;
    return out;
}

} // namespace

Mismatches mismatches_from_dispersion(const PumpConfig &pc, const DispersionModel &disp_signal_band,
                                      int mu) {
    if (mu == 0) throw std::invalid_argument("mismatches_from_dispersion: mu must be nonzero");
    pc.validate();
    const double e1 = pump_intracavity(pc.p1_power, pc.p1_detuning, pc.pump_coupling);
    const double e2 = pump_intracavity(pc.p2_power, pc.p2_detuning, pc.pump_coupling);
    const double xpm = 0.5 * pc.gamma_p * pc.ring_length * (e1 - e2);
    // signal-band round trip from its FSR
    const double t_round = kTwoPi / disp_signal_band.d1;
    return mismatches_impl(disp_signal_band, mu, pc.pump_separation, t_round, xpm);
}

SteadyStateFields steady_state(const FwmBsParams &p, double delta_s, double p_signal) {
    p.validate();
    if (p_signal < 0.0) throw std::invalid_argument("steady_state: p_signal must be >= 0");
    const double dn = delta_s * p.t_round;

    Eigen::Matrix3cd a;
    a << std::complex<double>(p.alpha, dn), -kI * p.omega0_cpl, -kI * p.omega0_cpl,
        -kI * p.omega0_cpl, std::complex<double>(p.alpha, dn + p.omega1_mis + p.omega2_disp), 0.0,
        -kI * p.omega0_cpl, 0.0, std::complex<double>(p.alpha, dn - p.omega1_mis + p.omega2_disp);
    Eigen::Vector3cd b;
    b << kI * std::sqrt(p.theta * p_signal), 0.0, 0.0;

    const Eigen::Vector3cd x = a.partialPivLu().solve(b);
    return {x(0), x(1), x(2)};
}

ConversionResult cw_response(const FwmBsParams &p, double delta_s, double p_signal) {
    if (!(p_signal > 0.0)) throw std::invalid_argument("cw_response: p_signal must be > 0");
    const SteadyStateFields f = steady_state(p, delta_s, p_signal);
    ConversionResult r;
    r.ce_blue = p.theta * std::norm(f.e_i_plus) / p_signal;
    r.ce_red = p.theta * std::norm(f.e_i_minus) / p_signal;
    r.t_signal = std::norm(1.0 + kI * std::sqrt(p.theta) * f.e_s / std::sqrt(p_signal));
    if (r.ce_blue + r.ce_red + r.t_signal > 1.0 + 1e-9)
        throw std::logic_error("cw_response: energy accounting violated");
    return r;
}

namespace {

// Unnormalized spectral density at offset u (rad/s) from the line center.
double spectral_density(const SignalSpectrum &s, double u) {
    const double gamma_w = kTwoPi * s.fwhm; // FWHM in rad/s
    switch (s.shape) {
    case SpectrumShape::lorentzian:
        return 1.0 / (u * u + 0.25 * gamma_w * gamma_w);
    case SpectrumShape::gaussian: {
        const double sigma = gamma_w / std::sqrt(8.0 * std::numbers::ln2);
        return std::exp(-0.5 * u * u / (sigma * sigma));
    }
    case SpectrumShape::delta:
        return 0.0; // handled before sampling
    }
    return 0.0;
}

ConversionResult spectral_average(const ParamsAtDetuning &p_at, const SignalSpectrum &spectrum,
                                  const GridControl &grid, int n_points) {
    const double half_span = grid.span_fwhm * kTwoPi * spectrum.fwhm;
    const double c = spectrum.center_detuning;
    const double h = 2.0 * half_span / (n_points - 1);
    double wsum = 0.0, ce_b = 0.0, ce_r = 0.0, ts = 0.0;
    for (int k = 0; k < n_points; ++k) {
        const double delta = c - half_span + k * h;
        const double trap = (k == 0 || k == n_points - 1) ? 0.5 : 1.0;
        const double w = trap * spectral_density(spectrum, delta - c);
        const ConversionResult r = cw_response(p_at(delta), delta, 1.0);
        wsum += w;
        ce_b += w * r.ce_blue;
        ce_r += w * r.ce_red;
        ts += w * r.t_signal;
    }
    return {ce_b / wsum, ce_r / wsum, ts / wsum};
}

} // namespace

ConversionResult pulsed_response(const ParamsAtDetuning &p_at, const SignalSpectrum &spectrum,
                                 const GridControl &grid) {
    spectrum.validate();
    if (spectrum.shape == SpectrumShape::delta)
        return cw_response(p_at(spectrum.center_detuning), spectrum.center_detuning, 1.0);

    int n = grid.initial_points | 1; // odd grid keeps the center on a node
    ConversionResult prev = spectral_average(p_at, spectrum, grid, n);
    for (int d = 0; d < grid.max_doublings; ++d) {
        n = 2 * (n - 1) + 1;
        const ConversionResult cur = spectral_average(p_at, spectrum, grid, n);
        const double scale = std::max({std::abs(cur.ce_blue), std::abs(cur.ce_red),
                                       std::abs(cur.t_signal), 1e-30});
        const double change = std::max({std::abs(cur.ce_blue - prev.ce_blue),
                                        std::abs(cur.ce_red - prev.ce_red),
                                        std::abs(cur.t_signal - prev.t_signal)}) /
                              scale;
        prev = cur;
        if (change <= grid.rel_tol) return cur;
    }
    throw AccuracyError("pulsed_response: spectral average did not converge to rel_tol " +
                        std::to_string(grid.rel_tol));
}

std::vector<std::pair<double, ConversionResult>>
detuning_sweep(const FwmBsParams &p_base, const std::vector<double> &deltas, double p_signal) {
    if (deltas.empty()) throw std::invalid_argument("detuning_sweep: empty detuning list");
    std::vector<std::pair<double, ConversionResult>> out;
    out.reserve(deltas.size());
    for (double d : deltas) out.emplace_back(d, cw_response(p_base, d, p_signal));
    return out;
}

std::vector<std::pair<double, ConversionResult>>
bandwidth_sweep(const ParamsAtDetuning &p_at, const std::vector<double> &fwhms, SpectrumShape shape,
                const GridControl &grid) {
    std::vector<std::pair<double, ConversionResult>> out;
    out.reserve(fwhms.size());
    for (double f : fwhms) {
        if (!(f > 0.0)) throw std::invalid_argument("bandwidth_sweep: fwhm must be > 0");
        SignalSpectrum s{f, shape, 0.0};
        out.emplace_back(f, pulsed_response(p_at, s, grid));
    }
    return out;
}

std::vector<std::pair<double, ConversionResult>>
pump2_detuning_sweep(const PumpConfig &pc, const std::vector<double> &detunings2,
                     const SignalSpectrum &spectrum, const ModeCoupling &signal_mc,
                     const DispersionModel &disp, int mu, const GridControl &grid) {
    if (mu == 0) throw std::invalid_argument("pump2_detuning_sweep: mu must be nonzero");
    pc.validate();
    const auto [alpha, theta] = coupling_rates(signal_mc);
    const double t_round = signal_mc.t_round;

    // Separation at zero pump-2 detuning lands the mu-FSR target on its mode.
    const double sep0 = std::abs(resonance_frequency(disp, mu) - disp.omega0_ref);
    const double e1 = pump_intracavity(pc.p1_power, pc.p1_detuning, pc.pump_coupling);

    std::vector<std::pair<double, ConversionResult>> out;
    out.reserve(detunings2.size());
    for (double d2 : detunings2) {
        const double e2 = pump_intracavity(pc.p2_power, d2, pc.pump_coupling);
        const double xpm = 0.5 * pc.gamma_p * pc.ring_length * (e1 - e2);
        const Mismatches mm = mismatches_impl(disp, mu, sep0 + d2, t_round, xpm);
        FwmBsParams p;
        p.omega0_cpl = 2.0 * pc.gamma_s * pc.ring_length * std::sqrt(e1 * e2);
        p.omega1_mis = mm.omega1;
        p.omega2_disp = mm.omega2;
        p.alpha = alpha;
        p.theta = theta;
        p.t_round = t_round;
        out.emplace_back(d2, pulsed_response([&p](double) { return p; }, spectrum, grid));
    }
    return out;
}

std::vector<WindowPoint> translation_window(const PumpConfig &pc, const DispersionModel &disp_signal,
                                            const DispersionModel &disp_pump,
                                            const std::vector<int> &mus,
                                            const SignalSpectrum &spectrum,
                                            const ModeCoupling &signal_mc, const GridControl &grid) {
    if (mus.empty()) throw std::invalid_argument("translation_window: empty mu list");
    pc.validate();
    const auto [alpha, theta] = coupling_rates(signal_mc);
    const double t_round = signal_mc.t_round;

    const double e1 = pump_intracavity(pc.p1_power, pc.p1_detuning, pc.pump_coupling);
    const double e2 = pump_intracavity(pc.p2_power, pc.p2_detuning, pc.pump_coupling);
    const double omega0 = 2.0 * pc.gamma_s * pc.ring_length * std::sqrt(e1 * e2);
    const double xpm = 0.5 * pc.gamma_p * pc.ring_length * (e1 - e2);

    std::vector<WindowPoint> out;
    out.reserve(mus.size());
    for (int mu : mus) {
        if (mu == 0) throw std::invalid_argument("translation_window: mu must be nonzero");
        const int m = std::abs(mu);
        const double sep = resonance_frequency(disp_pump, m) - disp_pump.omega0_ref;
        const Mismatches mm = mismatches_impl(disp_signal, mu, sep, t_round, xpm);
        FwmBsParams p{omega0, mm.omega1, mm.omega2, alpha, theta, t_round};
        const ConversionResult r = pulsed_response([&p](double) { return p; }, spectrum, grid);
        WindowPoint w;
        w.mu = mu;
        w.shift = disp_signal.d1 * mu / kTwoPi;
        w.ce_blue = r.ce_blue;
        w.ce_red = r.ce_red;
        out.push_back(w);
    }
    return out;
}

} // namespace ringqfc
