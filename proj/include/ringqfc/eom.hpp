#ifndef RINGQFC_EOM_HPP
#define RINGQFC_EOM_HPP

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace ringqfc {

struct EomConfig {
    double mod_freq = 100e9; // Hz
    int max_order = 20;

    void validate() const;
};

// Bessel function of the first kind, integer order. Power series at small
// argument, Miller backward recurrence with sum normalization otherwise.
// Relative accuracy <= 1e-10 for |x| <= 50 and |n| within a few hundred.
template <typename Scalar> Scalar bessel_j(int n, Scalar x) {
    const bool flip = n < 0 && (n & 1);
    n = std::abs(n);
    if (x < Scalar(0)) {
        if (n & 1) { /* J_n(-x) = (-1)^n J_n(x) */
        }
        return (n & 1 ? Scalar(-1) : Scalar(1)) * bessel_j(n, -x) * (flip ? Scalar(-1) : Scalar(1));
    }
    if (x == Scalar(0)) return (n == 0 ? Scalar(1) : Scalar(0)) * (flip ? Scalar(-1) : Scalar(1));

    Scalar value;
    if (x < Scalar(2) || x < Scalar(n) / 4) {
        // ascending series: (x/2)^n / n! sum_k (-(x/2)^2)^k / (k! (n+k)_k)
        const Scalar x2 = x / 2;
        Scalar term = 1;
        for (int k = 1; k <= n; ++k) term *= x2 / Scalar(k);
        Scalar sum = term;
        const Scalar mx2sq = -x2 * x2;
        for (int k = 1; k < 200; ++k) {
            term *= mx2sq / (Scalar(k) * Scalar(n + k));
            sum += term;
            if (std::abs(term) < std::abs(sum) * Scalar(1e-17)) break;
        }
        value = sum;
    } else {
        // Miller's algorithm: recur downward from well above max(n, x) and
        // normalize with J_0 + 2 J_2 + 2 J_4 + ... = 1.
        const int top = std::max(n, static_cast<int>(x)) + 26 +
                        static_cast<int>(Scalar(8) * std::sqrt(Scalar(std::max(n, static_cast<int>(x)))));
        Scalar jp = 0, j = Scalar(1e-300), norm = 0, out = 0;
        for (int k = top; k >= 0; --k) {
            const Scalar jm = Scalar(2 * (k + 1)) / x * j - jp;
            jp = j;
            j = jm;
            if (k == n) out = j;
            if (k % 2 == 0) norm += (k == 0 ? j : 2 * j);
            if (std::abs(j) > Scalar(1e250)) { // rescale to avoid overflow
                j *= Scalar(1e-250);
                jp *= Scalar(1e-250);
                norm *= Scalar(1e-250);
                out *= Scalar(1e-250);
            }
        }
        value = out / norm;
    }
    return flip ? -value : value;
}

// Normalized power in the n-th modulation sideband, J_n(phi0)^2.
double sideband_efficiency(int n, double phi0);

// Maximum of J_n^2 over modulation depth, located by a coarse scan refined
// with golden-section search on (0, n + 10].
struct SidebandMax {
    double phi0 = 0.0;
    double efficiency = 0.0;
};
SidebandMax max_sideband_efficiency(int n);

// Best-sideband EOM efficiency against the FWM-BS window, per target shift.
struct EomComparisonRow {
    double shift_hz = 0.0;
    int sideband = 0;
    double eom_eff = 0.0;
    double fwmbs_ce = 0.0;
    bool reachable = true; // shift within fm/2 of an integer sideband
};
std::vector<EomComparisonRow> eom_vs_fwmbs(const EomConfig &cfg,
                                           const std::vector<std::pair<double, double>> &window);

} // namespace ringqfc

#endif
