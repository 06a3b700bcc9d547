#ifndef RINGQFC_HOM_HPP
#define RINGQFC_HOM_HPP

#include <array>
#include <vector>

namespace ringqfc {

// Single-photon wavepacket entering the 50/50 coupler. gamma is the decay
// rate of the two-photon correlation exp(-gamma |t_sep|); for a Lorentzian
// line of FWHM dv it equals 2 pi dv.
struct PhotonWavepacket {
    double center_freq = 0.0;                    // rad/s
    double gamma = 0.0;                          // 1/s
    std::array<double, 3> polarization{1, 0, 0}; // unit vector
    double arrival_time = 0.0;                   // s

    void validate() const;
};

// Relative coincidence rate sampled over detector delay. Normalization:
// the orthogonal-polarization peak at zero arrival-time difference equals 2.
struct CoincidenceProfile {
    std::vector<double> taus;  // s
    std::vector<double> rates; // >= 0

    void validate() const;
};

struct DetectorModel {
    double jitter_fwhm = 120e-12; // s, combined two-detector Gaussian response
    double bin_width = 64e-12;    // s

    void validate() const;
    double sigma() const; // jitter_fwhm / sqrt(8 ln 2)
};

// Two-photon coincidence profile after the 50/50 coupler:
//   P(tau) = e^{-g|tau-dt|} + e^{-g|tau+dt|} - 2 e^{-g max(|tau|,|dt|)} cos(dw tau) (es.ei)^2
// The cross term carries the product of the two wavepacket envelopes, which
// is constant for |tau| < |dt|; this keeps P >= 0 for every input.
CoincidenceProfile coincidence_profile(const PhotonWavepacket &a, const PhotonWavepacket &b,
                                       const std::vector<double> &taus);

// Peak contrast between orthogonal and parallel polarizations (same
// frequency, arrival delayed by delta_t), maximized over detector delay.
double visibility(double gamma, double delta_t);

// Accidental floor, Gaussian jitter convolution, then integration into bins
// of bin_width centered on multiples of bin_width. Binned rates are counts
// per bin, so their sum equals the integral of the convolved profile.
// Requires profile spacing <= bin_width / 8 and a uniform grid.
CoincidenceProfile apply_detector(const CoincidenceProfile &profile, const DetectorModel &det,
                                  double accidental_floor);

// Jitter convolution alone, on the input grid (the first stage of
// apply_detector); exposed for analytic cross-checks.
CoincidenceProfile jitter_convolve(const CoincidenceProfile &profile, const DetectorModel &det);

// Parallel-polarization quantum-beat family at zero arrival-time difference,
// each profile passed through the detector model.
std::vector<std::pair<double, CoincidenceProfile>>
beat_family(double gamma, const std::vector<double> &delta_fs, const DetectorModel &det,
            double accidental_floor);

// Post-detector visibility (peak contrast after jitter, binning and floor)
// as a function of the relative optical delay.
std::vector<std::pair<double, double>> visibility_sweep(double gamma,
                                                        const std::vector<double> &delta_ts,
                                                        const DetectorModel &det,
                                                        double accidental_floor);

} // namespace ringqfc

#endif
