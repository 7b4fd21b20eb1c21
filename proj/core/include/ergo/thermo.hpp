#pragma once

#include "ergo/dynamics.hpp"
#include "ergo/spectral.hpp"

#include <vector>

namespace ergo {

inline constexpr double kCommutatorTol = 1e-10;
inline constexpr double kFeasibilityTol = 1e-10;
inline constexpr double kProbabilityTol = 1e-9;

/// Ordered family G_0 = 1, G_1 = H, G_i = F_i (i >= 2) of commuting
/// observables, one per distinct energy level, together with the Gram
/// matrix g_ij = tr(Pi_i G_j) and its inverse h.
///
/// All member operators must commute with H and act as scalars inside each
/// degenerate level (their joint eigenspaces refine to the level
/// decomposition); this is validated, not assumed. Linear independence is
/// certified by the invertibility of g.
///
/// Probability vectors handled by this module are level probabilities
/// P_k = tr(Pi_k rho), size m+1. For a nondegenerate spectrum these are the
/// per-eigenstate populations.
class ConservedSet {
  public:
    /// The default family: identity, the Hamiltonian, and the level
    /// projectors Pi_2 .. Pi_m. Throws DegenerateTrivial when the spectrum
    /// has a single distinct level.
    static ConservedSet default_set(const SpectralDecomposition& spec);

    /// Custom family {F_2 .. F_m} completing {1, H}. observables.size()
    /// must be m-1. Throws NonCommuting or SingularGram on invalid input.
    static ConservedSet with_observables(
        const SpectralDecomposition& spec,
        const std::vector<HermitianOperator>& observables);

    int size() const { return static_cast<int>(operators_.size()); }  // m+1
    const CMatrix& op(int j) const {
        return operators_[static_cast<std::size_t>(j)];
    }
    const RMatrix& gram() const { return gram_; }
    const RMatrix& gram_inverse() const { return gram_inverse_; }
    const std::vector<int>& level_ranks() const { return ranks_; }
    const CMatrix& projector(int level) const {
        return projectors_[static_cast<std::size_t>(level)];
    }
    Eigen::Index dim() const { return operators_.front().rows(); }

  private:
    ConservedSet(const SpectralDecomposition& spec,
                 std::vector<CMatrix> operators);

    std::vector<CMatrix> operators_;
    std::vector<CMatrix> projectors_;
    std::vector<int> ranks_;
    RMatrix gram_;
    RMatrix gram_inverse_;
};

/// The equilibrium state in both of its representations, with the
/// conjugate variables derived from the entropy gradient.
struct ThermoSolution {
    RVector probabilities;         // level probabilities P, size m+1
    double entropy = 0.0;          // von Neumann entropy, nats
    RVector gamma;                 // conjugate vector gamma_0 .. gamma_m
    double beta = 0.0;             // gamma_1, inverse energy units
    RVector chemical_potentials;   // gamma_2 .. gamma_m (may be empty)
    double log_partition = 0.0;    // ln Z = gamma_0 + 1
    DensityMatrix equilibrium;     // sum_k (P_k / r_k) Pi_k
    DensityMatrix grand_canonical; // exp(-beta H - sum mu_i F_i) / Z

    /// Max entrywise gap between the two representations.
    double dual_residual() const;
};

/// Residuals of the finite-difference entropy gradient against the
/// analytic conjugate variables, one entry per coordinate E, F_2 .. F_m.
struct DifferentialReport {
    RVector analytic;           // (beta, mu_2 .. mu_m)
    RVector finite_difference;  // central differences of S
    RVector residuals;          // finite_difference - analytic
    double max_abs_residual() const;
};

/// G_j = tr(rho G_j) for the level-probability vector p: sum_k (p_k / r_k)
/// g_kj. G_0 is always 1.
RVector conserved_values(const ConservedSet& set, const RVector& p);

/// Inverts conserved_values through h: reconstructs the level weights from
/// the expectation values and flags any entry outside [0, 1] with
/// InfeasibleValues instead of clamping.
RVector probabilities_from_values(const ConservedSet& set, const RVector& G);

/// Shannon entropy -sum p_i ln p_i in nats, with 0 ln 0 = 0. Validates that
/// p is a probability vector.
double entropy(const RVector& p);

/// Conjugate variables of the equilibrium state with level probabilities p:
/// gamma_i = -sum_k r_k h_ik (ln w_k + 1) with w_k = p_k / r_k, beta =
/// gamma_1, mu_i = gamma_i, ln Z = gamma_0 + 1. Builds both density-matrix
/// representations. Throws BoundaryState if any p_k vanishes.
ThermoSolution conjugate_variables(const ConservedSet& set, const RVector& p);

/// rho = exp(-beta H - sum_{i>=2} mu_i F_i) / Z, evaluated in the joint
/// eigenbasis with a max-shift for overflow safety. mu must have size m-1.
DensityMatrix grand_canonical(const SpectralDecomposition& spec,
                              const ConservedSet& set, double beta,
                              const RVector& mu);

/// Two-level inverse temperature at mean energy E:
/// beta = ln((E1 - E)/(E - E0)) / (E1 - E0). Requires E0 < E < E1.
double two_level_beta(double E, double E0, double E1);

/// Canonical two-level mean energy at inverse temperature beta; the inverse
/// of two_level_beta. Monotone decreasing, limits E1 and E0 at -/+ infinity.
double two_level_energy(double beta, double E0, double E1);

/// Mean energy of the spectrum (E0, E1, E1) at inverse temperature beta.
double degenerate_three_level_energy(double beta, double E0, double E1);

/// Central-difference check of dS = beta dE + sum mu_k dF_k: perturbs each
/// conserved value by +/- step while holding the others fixed, rebuilds the
/// probabilities, and differences the entropy. Throws BoundaryState if p or
/// a perturbed vector touches the simplex boundary.
DifferentialReport thermo_differential_check(const ConservedSet& set,
                                             const RVector& p, double step);

}  // namespace ergo
