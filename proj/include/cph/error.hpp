#pragma once

#include <stdexcept>
#include <string>

namespace cph {

enum class Errc {
    NotIntensityMatrix,
    ReducibleChain,
    ZeroExitRate,
    NoRealArrivals,
    InvalidService,
    UnsupportedFamily,
    StateSpaceTooLarge,
    ConfigError,
    Unstable,
    UnstableSimulation,
    NoConvergence,
    DegreeOverflow,
    UnstablePole,
    OscillationDetected,
    DegreeMismatch,
    WrongRootCount,
    MultiplePositiveRoot,
    ZeroAdjugate,
    SingularSystem,
    CancellationFailure,
    AllCofactorsZero,
    ZeroDerivative,
    SingularA,
    DegreeViolation,
    InconsistentDelta,
    QuadratureFailure,
    RootDivergence,
    BranchCutCrossing,
};

const char* errc_name(Errc code) noexcept;

/// Library error carrying a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace cph
