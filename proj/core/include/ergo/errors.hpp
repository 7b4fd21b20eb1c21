#pragma once

#include <stdexcept>
#include <string>

namespace ergo {

// Base class for every typed failure the library reports. Callers that only
// care about "something went wrong" can catch this; the CLI maps the derived
// types onto exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input matrix is not self-adjoint within the requested tolerance.
struct NonHermitian : Error {
    using Error::Error;
};

// The eigensolver failed to converge.
struct ConvergenceFailure : Error {
    using Error::Error;
};

// Operands have incompatible dimensions.
struct DimensionMismatch : Error {
    using Error::Error;
};

// A state vector is not normalized within tolerance.
struct NotNormalized : Error {
    using Error::Error;
};

// Averaging horizon T must be strictly positive.
struct NonPositiveHorizon : Error {
    using Error::Error;
};

// The spectrum has a single distinct eigenvalue; the Hamiltonian is a
// multiple of the identity and carries no usable conserved structure.
struct DegenerateTrivial : Error {
    using Error::Error;
};

// A supplied observable does not commute with the Hamiltonian (or acts
// nontrivially inside a degenerate level).
struct NonCommuting : Error {
    using Error::Error;
};

// The Gram matrix of the conserved set is singular: the operators are
// linearly dependent.
struct SingularGram : Error {
    using Error::Error;
};

// The requested expectation values are not achievable by any state (some
// reconstructed probability falls outside [0, 1]).
struct InfeasibleValues : Error {
    using Error::Error;
};

// Input vector is not a probability vector.
struct NotAProbabilityVector : Error {
    using Error::Error;
};

// Some probability vanishes: the conjugate variables diverge on the
// boundary of the simplex and are not reported.
struct BoundaryState : Error {
    using Error::Error;
};

// Scalar argument outside its admissible interval.
struct OutOfRange : Error {
    using Error::Error;
};

// Requested torus dimension outside the supported range.
struct OutOfRangeDimension : Error {
    using Error::Error;
};

// Named observable not present in the problem file.
struct UnknownObservable : Error {
    using Error::Error;
};

// Malformed problem file; message carries the field or byte locus.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace ergo
