#pragma once

#include <stdexcept>
#include <string>

namespace steercert {

/// Base class for all steercert errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shape or index mismatch between objects that must agree.
struct DimensionError : Error {
    using Error::Error;
};

/// Input data violates a structural precondition (non-Hermitian block,
/// incomplete POVM, inconsistent symmetry, ...).
struct InvalidInput : Error {
    using Error::Error;
};

/// A conic solve ended without a conclusive status (distinct from a
/// well-defined infeasibility verdict).
struct SolverError : Error {
    using Error::Error;
};

} // namespace steercert
