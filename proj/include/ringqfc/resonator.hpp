#ifndef RINGQFC_RESONATOR_HPP
#define RINGQFC_RESONATOR_HPP

#include <vector>

namespace ringqfc {

// Taylor coefficients of one resonance comb about a reference mode.
struct DispersionModel {
    double omega0_ref = 0.0; // rad/s, resonance frequency of mode mu = 0
    double d1 = 0.0;         // rad/s, angular FSR
    double d2 = 0.0;         // rad/s, quadratic dispersion
    double d3 = 0.0;         // rad/s, cubic dispersion

    void validate() const; // omega0_ref > 0, d1 > 0
};

// Loss/coupling description of a single cavity mode.
struct ModeCoupling {
    double omega_res = 0.0; // rad/s
    double qi = 0.0;        // intrinsic quality factor
    double qc = 0.0;        // coupling quality factor
    double t_round = 0.0;   // s, round-trip time

    void validate() const;          // omega_res, qi, qc, t_round > 0
    double loaded_q() const;        // (1/qi + 1/qc)^-1
    double loaded_linewidth() const; // Hz, omega_res / (2 pi QL)
};

// Per-round-trip loss and waveguide coupling rates: alpha = w tR / (2 QL), theta = w tR / Qc.
struct CouplingRates {
    double alpha = 0.0;
    double theta = 0.0;
};

CouplingRates coupling_rates(const ModeCoupling &mc);

// Resonance frequency of mode mu: w0 + D1 mu + D2 mu^2 / 2 + D3 mu^3 / 6.
double resonance_frequency(const DispersionModel &disp, int mu);

// Normalized all-pass power transmission at detuning delta (rad/s):
// T = |1 - theta / (alpha + i delta tR)|^2. Same drive convention as the FWM-BS solver.
double linear_transmission(const ModeCoupling &mc, double delta);

struct ModeRecord {
    int mu = 0;
    double omega = 0.0; // rad/s
};

struct TransmissionScan {
    std::vector<double> detunings;    // rad/s, strictly increasing, relative to a guess frequency
    std::vector<double> transmission; // dimensionless, in [0, 1]

    void validate() const;
};

struct DispersionFit {
    DispersionModel model;
    std::vector<double> residuals; // rad/s, one per input mode, against the final model
    std::vector<int> rejected;     // mu values excluded by the outlier pass
};

// Least-squares fit of the comb coefficients. Modes whose residual exceeds
// reject_threshold * median(|residual|) are dropped and the fit repeated once.
// D3 is fit only when at least 6 modes survive.
DispersionFit fit_dispersion(const std::vector<ModeRecord> &modes, double reject_threshold = 5.0);

// Both (Qi, Qc) assignments consistent with a fitted Lorentzian dip. A given
// (depth, width) cannot distinguish under- from overcoupling; the caller picks.
struct ModeFitResult {
    ModeCoupling undercoupled;
    ModeCoupling overcoupled;
    double residual_rms = 0.0;
};

ModeFitResult fit_mode(const TransmissionScan &scan, double omega_guess, double t_round);

} // namespace ringqfc

#endif
