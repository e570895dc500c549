#pragma once

#include <stdexcept>
#include <string>

namespace mlsos {

// Base for all solver errors so callers can catch the whole family.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// linalg
struct SingularMatrix : SolverError {
    using SolverError::SolverError;
};
struct NoConvergence : SolverError {
    using SolverError::SolverError;
};

// lp
struct NumericalFailure : SolverError {
    using SolverError::SolverError;
};

// polytope
struct InconsistentEqualities : SolverError {
    using SolverError::SolverError;
};
struct DegenerateBlock : SolverError {
    using SolverError::SolverError;
};
struct EmptyRelativeInterior : SolverError {
    using SolverError::SolverError;
};
struct TooManyCombinations : SolverError {
    using SolverError::SolverError;
};
struct UnboundedBlock : SolverError {
    using SolverError::SolverError;
};

// poly / mlp / hierarchy
struct CapExceeded : SolverError {
    using SolverError::SolverError;
};
struct OrderTooSmall : SolverError {
    using SolverError::SolverError;
};
struct DimensionMismatch : SolverError {
    using SolverError::SolverError;
};

// apps
struct NonPositiveEntries : SolverError {
    using SolverError::SolverError;
};
struct KernelConditionFailed : SolverError {
    using SolverError::SolverError;
};
struct NoNontrivialOptimizer : SolverError {
    using SolverError::SolverError;
};

// cli
struct InputError : SolverError {
    using SolverError::SolverError;
};

}  // namespace mlsos
