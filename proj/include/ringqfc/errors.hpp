#ifndef RINGQFC_ERRORS_HPP
#define RINGQFC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ringqfc {

// Input data cannot support the requested operation (too few points, etc).
struct InsufficientDataError : std::runtime_error {
    explicit InsufficientDataError(const std::string &what) : std::runtime_error(what) {}
};

// Design matrix rank-deficient or otherwise not solvable.
struct SingularFitError : std::runtime_error {
    explicit SingularFitError(const std::string &what) : std::runtime_error(what) {}
};

// A scan contains no resonance to fit.
struct NoResonanceError : std::runtime_error {
    explicit NoResonanceError(const std::string &what) : std::runtime_error(what) {}
};

// Nonlinear fit failed to converge within the iteration budget.
struct FitFailureError : std::runtime_error {
    FitFailureError(const std::string &what, double residual_rms)
        : std::runtime_error(what), residual_rms(residual_rms) {}
    double residual_rms = 0.0;
};

// Numerical integration did not reach the requested tolerance.
struct AccuracyError : std::runtime_error {
    explicit AccuracyError(const std::string &what) : std::runtime_error(what) {}
};

// Parameter combination outside the model's contract.
struct UnsupportedConfigurationError : std::runtime_error {
    explicit UnsupportedConfigurationError(const std::string &what) : std::runtime_error(what) {}
};

// Scenario configuration problems (syntax, unknown or missing keys).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string &what) : std::runtime_error(what) {}
};

} // namespace ringqfc

#endif
