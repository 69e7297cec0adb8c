#include "cph/error.hpp"

namespace cph {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::NotIntensityMatrix: return "NotIntensityMatrix";
        case Errc::ReducibleChain: return "ReducibleChain";
        case Errc::ZeroExitRate: return "ZeroExitRate";
        case Errc::NoRealArrivals: return "NoRealArrivals";
        case Errc::InvalidService: return "InvalidService";
        case Errc::UnsupportedFamily: return "UnsupportedFamily";
        case Errc::StateSpaceTooLarge: return "StateSpaceTooLarge";
        case Errc::ConfigError: return "ConfigError";
        case Errc::Unstable: return "Unstable";
        case Errc::UnstableSimulation: return "UnstableSimulation";
        case Errc::NoConvergence: return "NoConvergence";
        case Errc::DegreeOverflow: return "DegreeOverflow";
        case Errc::UnstablePole: return "UnstablePole";
        case Errc::OscillationDetected: return "OscillationDetected";
        case Errc::DegreeMismatch: return "DegreeMismatch";
        case Errc::WrongRootCount: return "WrongRootCount";
        case Errc::MultiplePositiveRoot: return "MultiplePositiveRoot";
        case Errc::ZeroAdjugate: return "ZeroAdjugate";
        case Errc::SingularSystem: return "SingularSystem";
        case Errc::CancellationFailure: return "CancellationFailure";
        case Errc::AllCofactorsZero: return "AllCofactorsZero";
        case Errc::ZeroDerivative: return "ZeroDerivative";
        case Errc::SingularA: return "SingularA";
        case Errc::DegreeViolation: return "DegreeViolation";
        case Errc::InconsistentDelta: return "InconsistentDelta";
        case Errc::QuadratureFailure: return "QuadratureFailure";
        case Errc::RootDivergence: return "RootDivergence";
        case Errc::BranchCutCrossing: return "BranchCutCrossing";
    }
    return "Unknown";
}

}  // namespace cph
