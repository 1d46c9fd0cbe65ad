#pragma once

#include <stdexcept>
#include <string>

namespace qmeta {

// Base class for all physics/numerics failures so callers can catch one type.
struct EngineError : std::runtime_error {
    explicit EngineError(const std::string& what) : std::runtime_error(what) {}
};

// Parameter point sits on a resonance pole of the closed-form susceptibility.
struct DegenerateDenominator : EngineError {
    using EngineError::EngineError;
};

// chi approaches 3: Lorentz local-field resonance, chi/(1 - chi/3) blows up.
struct LorentzPole : EngineError {
    using EngineError::EngineError;
};

// No (delta_b, pump) in the search window cancels absorption.
struct NoLosslessPoint : EngineError {
    using EngineError::EngineError;
};

// Liouvillian kernel dimension != 1 (disconnected level structure).
struct DegenerateSteadyState : EngineError {
    using EngineError::EngineError;
};

// Probe-linearity check failed even at the smallest allowed probe strength.
struct NonlinearProbe : EngineError {
    using EngineError::EngineError;
};

// Layer wavevector sits on a branch-point degeneracy (grazing/epsilon-near-zero).
struct BranchAmbiguity : EngineError {
    using EngineError::EngineError;
};

// Emitter position is not in a vacuum-like region; gap formula inapplicable.
struct DipoleInsideMedium : EngineError {
    using EngineError::EngineError;
};

// Multiple-reflection denominator vanished at a quadrature node and persisted
// after node perturbation (guided-mode pole on the integration path).
struct ResonantDenominator : EngineError {
    using EngineError::EngineError;
};

// Config/schema problems (CLI exit code 2).
struct ConfigError : EngineError {
    using EngineError::EngineError;
};

} // namespace qmeta
