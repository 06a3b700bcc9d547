#ifndef RINGQFC_FWMBS_HPP
#define RINGQFC_FWMBS_HPP

#include "ringqfc/resonator.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace ringqfc {

// Reduced five-parameter model driving the three-mode Bragg-scattering solver.
// All rates are dimensionless per round trip; detunings at the public surface
// are physical rad/s and are multiplied by t_round internally.
struct FwmBsParams {
    double omega0_cpl = 0.0;  // Bragg-scattering coupling
    double omega1_mis = 0.0;  // idler-asymmetry mismatch
    double omega2_disp = 0.0; // dispersion mismatch
    double alpha = 0.0;       // cavity loss rate
    double theta = 0.0;       // waveguide power coupling
    double t_round = 0.0;     // s

    void validate() const; // alpha > 0, 0 < theta <= 2 alpha, omega0_cpl >= 0
};

struct PumpConfig {
    double p1_power = 0.0;        // W on chip
    double p2_power = 0.0;        // W on chip
    double p1_detuning = 0.0;     // rad/s
    double p2_detuning = 0.0;     // rad/s
    double pump_separation = 0.0; // rad/s, |w_p1 - w_p2|
    double gamma_p = 0.0;         // 1/(W m), Kerr coefficient, pump band
    double gamma_s = 0.0;         // 1/(W m), Kerr coefficient, signal band
    double ring_length = 0.0;     // m
    ModeCoupling pump_coupling;   // shared by both pumps

    void validate() const;
};

struct SteadyStateFields {
    std::complex<double> e_s;
    std::complex<double> e_i_plus;  // blue (up-shifted) idler
    std::complex<double> e_i_minus; // red (down-shifted) idler
};

struct ConversionResult {
    double ce_blue = 0.0;  // on-chip conversion efficiency, up-shifted idler
    double ce_red = 0.0;   // on-chip conversion efficiency, down-shifted idler
    double t_signal = 0.0; // signal power transmission
};

enum class SpectrumShape { lorentzian, gaussian, delta };

struct SignalSpectrum {
    double fwhm = 0.0; // Hz, ignored for delta
    SpectrumShape shape = SpectrumShape::lorentzian;
    double center_detuning = 0.0; // rad/s

    void validate() const;
};

// Integration control for the spectral average. The spectrum is truncated at
// center +- span_fwhm * fwhm and sampled on a uniform grid that doubles until
// all three outputs change by less than rel_tol.
struct GridControl {
    double span_fwhm = 2.1;
    int initial_points = 501;
    double rel_tol = 1e-4;
    int max_doublings = 8;
};

// Intracavity pump power |E_p|^2 = theta_p P / (alpha_p^2 + (delta tR)^2).
double pump_intracavity(double power, double detuning, const ModeCoupling &mc);

// Omega_0 = 2 gamma_s L |E_p1 E_p2| from the intracavity pump powers.
double omega0_from_pumps(const PumpConfig &pc);

// (Omega_1, Omega_2) for the idler pair at modes +-|mu|, pump separation from
// pc.pump_separation. Uses the exact comb differences so any d3 is included:
//   Omega_1 = ((w(m) - w(-m))/2 - sep) tR - (gamma_p L / 2)(|E_p1|^2 - |E_p2|^2)
//   Omega_2 = ((w(m) + w(-m) - 2 w(0))/2) tR
struct Mismatches {
    double omega1 = 0.0;
    double omega2 = 0.0;
};
Mismatches mismatches_from_dispersion(const PumpConfig &pc, const DispersionModel &disp_signal_band,
                                      int mu);

// Steady state of the three coupled modes for a cw signal drive.
SteadyStateFields steady_state(const FwmBsParams &p, double delta_s, double p_signal);

// ce_+- = theta |E_i+-|^2 / P_s, t = |1 + i sqrt(theta) E_s / sqrt(P_s)|^2.
ConversionResult cw_response(const FwmBsParams &p, double delta_s, double p_signal);

// Spectral-density weighted average of cw_response over the input spectrum.
// A delta spectrum reduces exactly to cw_response at the center detuning.
using ParamsAtDetuning = std::function<FwmBsParams(double delta_s)>;
ConversionResult pulsed_response(const ParamsAtDetuning &p_at, const SignalSpectrum &spectrum,
                                 const GridControl &grid = {});

std::vector<std::pair<double, ConversionResult>>
detuning_sweep(const FwmBsParams &p_base, const std::vector<double> &deltas, double p_signal);

std::vector<std::pair<double, ConversionResult>>
bandwidth_sweep(const ParamsAtDetuning &p_at, const std::vector<double> &fwhms, SpectrumShape shape,
                const GridControl &grid = {});

// Pump-2 detuning sweep at fixed pump 1. The strong pump pins the thermal
// operating point, so |E_p1|^2 is held at its detuning2 = 0 value while
// |E_p2|^2, Omega_0 and Omega_1 are recomputed per point; the pump separation
// tracks detuning2 around the value that lands the |mu|-FSR target on its mode.
std::vector<std::pair<double, ConversionResult>>
pump2_detuning_sweep(const PumpConfig &pc, const std::vector<double> &detunings2,
                     const SignalSpectrum &spectrum, const ModeCoupling &signal_mc,
                     const DispersionModel &disp, int mu, const GridControl &grid = {});

// Conversion across the frequency-matched translation window: for each mu the
// pumps sit on pump-band modes 0 and |mu|, so the separation carries the full
// pump-band Taylor series; shift is reported as d1(signal band) * mu / 2 pi.
struct WindowPoint {
    int mu = 0;
    double shift = 0.0; // Hz
    double ce_blue = 0.0;
    double ce_red = 0.0;
};
std::vector<WindowPoint> translation_window(const PumpConfig &pc, const DispersionModel &disp_signal,
                                            const DispersionModel &disp_pump,
                                            const std::vector<int> &mus,
                                            const SignalSpectrum &spectrum,
                                            const ModeCoupling &signal_mc,
                                            const GridControl &grid = {});

} // namespace ringqfc

#endif
