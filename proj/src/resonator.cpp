#include "ringqfc/resonator.hpp"
#include "ringqfc/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <string>

namespace ringqfc {

void DispersionModel::validate() const {
    if (!(omega0_ref > 0.0)) throw std::invalid_argument("DispersionModel: omega0_ref must be > 0");
    if (!(d1 > 0.0)) throw std::invalid_argument("DispersionModel: d1 must be > 0");
}

void ModeCoupling::validate() const {
    if (!(omega_res > 0.0)) throw std::invalid_argument("ModeCoupling: omega_res must be > 0");
    if (!(qi > 0.0)) throw std::invalid_argument("ModeCoupling: qi must be > 0");
    if (!(qc > 0.0)) throw std::invalid_argument("ModeCoupling: qc must be > 0");
    if (!(t_round > 0.0)) throw std::invalid_argument("ModeCoupling: t_round must be > 0");
}

double ModeCoupling::loaded_q() const { return 1.0 / (1.0 / qi + 1.0 / qc); }

double ModeCoupling::loaded_linewidth() const {
    return omega_res / (2.0 * std::numbers::pi * loaded_q());
}

CouplingRates coupling_rates(const ModeCoupling &mc) {
    mc.validate();
    const double ql = mc.loaded_q();
    return {mc.omega_res * mc.t_round / (2.0 * ql), mc.omega_res * mc.t_round / mc.qc};
}

double resonance_frequency(const DispersionModel &disp, int mu) {
    const double m = static_cast<double>(mu);
    return disp.omega0_ref + disp.d1 * m + 0.5 * disp.d2 * m * m + disp.d3 * m * m * m / 6.0;
}

double linear_transmission(const ModeCoupling &mc, double delta) {
    const auto [alpha, theta] = coupling_rates(mc);
    const std::complex<double> t = 1.0 - theta / std::complex<double>(alpha, delta * mc.t_round);
    return std::norm(t);
}

void TransmissionScan::validate() const {
    if (detunings.size() != transmission.size())
        throw std::invalid_argument("TransmissionScan: column length mismatch");
    if (detunings.size() < 3)
        throw std::invalid_argument("TransmissionScan: need at least 3 samples");
    for (std::size_t i = 1; i < detunings.size(); ++i)
        if (!(detunings[i] > detunings[i - 1]))
            throw std::invalid_argument("TransmissionScan: detunings must be strictly increasing");
    for (double t : transmission)
        if (!(t >= 0.0) || !(t <= 1.0 + 1e-9))
            throw std::invalid_argument("TransmissionScan: transmission outside [0, 1]");
}

namespace {

// Weighted polynomial LS in mu with columns scaled to unit norm; returns
// coefficients of [1, mu, mu^2/2, mu^3/6] (the last only when fit_d3).
Eigen::VectorXd comb_least_squares(const std::vector<ModeRecord> &modes,
                                   const std::vector<bool> &use, bool fit_d3) {
    const int n_cols = fit_d3 ? 4 : 3;
    int n_rows = 0;
    for (bool u : use) n_rows += u ? 1 : 0;

    Eigen::MatrixXd a(n_rows, n_cols);
    Eigen::VectorXd b(n_rows);
    int r = 0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (!use[i]) continue;
        const double m = modes[i].mu;
        a(r, 0) = 1.0;
        a(r, 1) = m;
        a(r, 2) = 0.5 * m * m;
        if (fit_d3) a(r, 3) = m * m * m / 6.0;
        b(r) = modes[i].omega;
        ++r;
    }

    Eigen::VectorXd scale(n_cols);
    for (int c = 0; c < n_cols; ++c) {
        scale(c) = a.col(c).norm();
        if (scale(c) == 0.0) throw SingularFitError("fit_dispersion: zero design column");
        a.col(c) /= scale(c);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < n_cols) throw SingularFitError("fit_dispersion: rank-deficient design matrix");
    Eigen::VectorXd x = qr.solve(b);
    return x.cwiseQuotient(scale);
}

DispersionModel model_from_coeffs(const Eigen::VectorXd &c) {
    DispersionModel m;
    m.omega0_ref = c(0);
    m.d1 = c(1);
    m.d2 = c(2);
    m.d3 = c.size() > 3 ? c(3) : 0.0;
    return m;
}

} // namespace

DispersionFit fit_dispersion(const std::vector<ModeRecord> &modes, double reject_threshold) {
    std::set<int> seen;
    for (const auto &m : modes)
        if (!seen.insert(m.mu).second)
            throw std::invalid_argument("fit_dispersion: duplicate mode order mu=" + std::to_string(m.mu));
    if (modes.size() < 4)
        throw InsufficientDataError("fit_dispersion: need at least 4 modes, got " +
                                    std::to_string(modes.size()));
    if (!seen.count(0))
        throw InsufficientDataError("fit_dispersion: mode mu=0 required");

    std::vector<bool> use(modes.size(), true);
    Eigen::VectorXd coeffs = comb_least_squares(modes, use, modes.size() >= 6);

    // One outlier pass against the median absolute residual.
    std::vector<double> absres(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const DispersionModel m0 = model_from_coeffs(coeffs);
        absres[i] = std::abs(modes[i].omega - resonance_frequency(m0, modes[i].mu));
    }
    std::vector<double> sorted = absres;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double mad = sorted[sorted.size() / 2];

    DispersionFit out;
    if (mad > 0.0) {
        for (std::size_t i = 0; i < modes.size(); ++i) {
            if (absres[i] > reject_threshold * mad) {
                use[i] = false;
                out.rejected.push_back(modes[i].mu);
            }
        }
    }
    std::size_t n_used = modes.size() - out.rejected.size();
    if (!out.rejected.empty()) {
        if (n_used < 4)
            throw InsufficientDataError("fit_dispersion: fewer than 4 modes left after outlier rejection");
        coeffs = comb_least_squares(modes, use, n_used >= 6);
    }

    out.model = model_from_coeffs(coeffs);
    out.residuals.resize(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i)
        out.residuals[i] = modes[i].omega - resonance_frequency(out.model, modes[i].mu);
    std::sort(out.rejected.begin(), out.rejected.end());
    return out;
}

namespace {

// T(delta) = 1 - depth * hw^2 / ((delta - center)^2 + hw^2), the exact shape of
// linear_transmission with depth = theta (2 alpha - theta) / alpha^2, hw = alpha / tR.
struct LorentzianDip {
    double depth, hw, center;
};

double dip_model(const LorentzianDip &p, double x) {
    const double u = x - p.center;
    return 1.0 - p.depth * p.hw * p.hw / (u * u + p.hw * p.hw);
}

} // namespace

ModeFitResult fit_mode(const TransmissionScan &scan, double omega_guess, double t_round) {
    scan.validate();
    if (!(omega_guess > 0.0)) throw std::invalid_argument("fit_mode: omega_guess must be > 0");
    if (!(t_round > 0.0)) throw std::invalid_argument("fit_mode: t_round must be > 0");

    const auto &x = scan.detunings;
    const auto &y = scan.transmission;
    const std::size_t n = x.size();

    std::size_t imin = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (y[i] < y[imin]) imin = i;
    if (y[imin] > 0.99)
        throw NoResonanceError("fit_mode: no dip found (min transmission > 0.99)");

    LorentzianDip p;
    p.center = x[imin];
    p.depth = 1.0 - y[imin];
    // crude initial half width: where the dip recovers to half depth
    const double half_level = 1.0 - 0.5 * p.depth;
    double hw = 0.1 * (x.back() - x.front());
    for (std::size_t i = imin; i < n; ++i) {
        if (y[i] > half_level) {
            hw = x[i] - x[imin];
            break;
        }
    }
    p.hw = std::max(hw, 1e-6 * (x.back() - x.front()));

    // Gauss-Newton with simple step damping.
    constexpr int kMaxIter = 100;
    double prev_ssr = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int it = 0; it < kMaxIter; ++it) {
        Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
        Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
        double ssr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = x[i] - p.center;
            const double den = u * u + p.hw * p.hw;
            const double r = y[i] - dip_model(p, x[i]);
            Eigen::Vector3d g; // d(model)/d(depth, hw, center)
            g(0) = -p.hw * p.hw / den;
            g(1) = -p.depth * (2.0 * p.hw * den - p.hw * p.hw * 2.0 * p.hw) / (den * den);
            g(2) = -p.depth * p.hw * p.hw * 2.0 * u / (den * den);
            jtj += g * g.transpose();
            jtr += g * r;
            ssr += r * r;
        }
        Eigen::Vector3d step = jtj.ldlt().solve(jtr);
        if (!step.allFinite()) throw FitFailureError("fit_mode: singular normal equations", std::sqrt(ssr / n));
        double lambda = 1.0;
        LorentzianDip next = p;
        for (int k = 0; k < 30; ++k) {
            next.depth = p.depth + lambda * step(0);
            next.hw = p.hw + lambda * step(1);
            next.center = p.center + lambda * step(2);
            if (next.depth > 0.0 && next.depth <= 1.0 && next.hw > 0.0) {
                double ssr2 = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double r = y[i] - dip_model(next, x[i]);
                    ssr2 += r * r;
                }
                if (ssr2 <= ssr) break;
            }
            lambda *= 0.5;
            next = p;
        }
        p = next;
        if (std::abs(prev_ssr - ssr) <= 1e-16 * (1.0 + ssr) && it > 2) {
            converged = true;
            break;
        }
        prev_ssr = ssr;
    }

    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - dip_model(p, x[i]);
        ssr += r * r;
    }
    const double rms = std::sqrt(ssr / n);
    if (!converged && rms > 1e-6)
        throw FitFailureError("fit_mode: no convergence after " + std::to_string(kMaxIter) +
                                  " iterations, residual rms " + std::to_string(rms),
                              rms);

    // Invert (depth, hw) to the two coupling assignments. With alpha = hw * tR:
    // theta = alpha (1 -+ sqrt(1 - depth)) is under/overcoupled respectively.
    const double omega_res = omega_guess + p.center;
    const double root = std::sqrt(std::max(0.0, 1.0 - p.depth));
    const double ql = omega_res / (2.0 * p.hw);

    ModeFitResult out;
    out.residual_rms = rms;
    for (int branch = 0; branch < 2; ++branch) {
        const double frac = branch == 0 ? (1.0 - root) : (1.0 + root); // theta / alpha
        const double qc = 2.0 * ql / frac;
        const double qi = 1.0 / (1.0 / ql - 1.0 / qc);
        ModeCoupling mc;
        mc.omega_res = omega_res;
        mc.qi = qi;
        mc.qc = qc;
        mc.t_round = t_round;
        (branch == 0 ? out.undercoupled : out.overcoupled) = mc;
    }
    return out;
}

} // namespace ringqfc
