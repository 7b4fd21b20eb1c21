#pragma once

#include <ergo/dynamics.hpp>
#include <ergo/spectral.hpp>

#include <string>
#include <utility>
#include <vector>

namespace ergo::cli {

/// Tolerance block. A negative degeneracy value means "derive from the
/// spectral range" (the library default).
struct Tolerances {
    double hermiticity = 1e-12;
    double degeneracy = -1.0;
    double resonance = 1e-9;
};

/// Built-in defaults overridden by ERGO_HERMITICITY_TOL,
/// ERGO_DEGENERACY_TOL and ERGO_RESONANCE_TOL when set.
Tolerances env_tolerances();

double resolve_degeneracy_tol(const Tolerances& tol,
                              const RVector& eigenvalues);

/// Parsed problem document. Complex numbers are [re, im] pairs throughout;
/// the initial state is normalized on load.
struct ProblemFile {
    CMatrix hamiltonian;
    CVector initial_state;
    std::vector<std::pair<std::string, CMatrix>> custom_observables;
    Tolerances tolerances;
};

/// Reads and validates a problem file. `defaults` seeds the tolerance
/// block; an in-file tolerances object overrides it field by field.
/// Throws ParseError with a field or byte locus on malformed input.
ProblemFile load_problem(const std::string& path, const Tolerances& defaults);

}  // namespace ergo::cli
