#pragma once

#include <Eigen/Dense>

#include <complex>
#include <utility>
#include <vector>

#include "ergo/errors.hpp"

namespace ergo {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kDefaultHermiticityTol = 1e-12;
inline constexpr double kDefaultResonanceTol = 1e-9;

// Largest entry magnitude; the max-norm used by all tolerance checks.
double max_abs(const CMatrix& m);

/// Dense self-adjoint operator on an (n+1)-dimensional Hilbert space.
/// Hermiticity is validated at construction; entries are stored as given.
class HermitianOperator {
  public:
    explicit HermitianOperator(CMatrix entries,
                               double hermiticity_tol = kDefaultHermiticityTol);

    static HermitianOperator identity(Eigen::Index dim);

    Eigen::Index dim() const { return entries_.rows(); }
    const CMatrix& matrix() const { return entries_; }

    // Max asymmetry max_ij |A_ij - conj(A_ji)| of an arbitrary matrix.
    static double asymmetry(const CMatrix& m);

  private:
    CMatrix entries_;
};

/// Eigensystem of a Hermitian operator with tolerance-based degeneracy
/// clustering. Eigenvalues within the degeneracy tolerance of their neighbor
/// are merged into one level; each level carries a rank-(cluster size)
/// projector and the arithmetic mean of its member eigenvalues.
class SpectralDecomposition {
  public:
    // evecs columns must be the orthonormal eigenvectors matching evals
    // (ascending). Clustering merges adjacent eigenvalues with gap <= tol.
    SpectralDecomposition(RVector evals, CMatrix evecs, double degeneracy_tol);

    Eigen::Index dim() const { return eigenvalues_.size(); }
    int num_levels() const { return static_cast<int>(clusters_.size()); }
    int m() const { return num_levels() - 1; }

    /// All eigenvalues, ascending, one per Hilbert-space dimension.
    const RVector& eigenvalues() const { return eigenvalues_; }
    /// Unitary matrix of eigenvector columns, phase-fixed so the
    /// largest-magnitude component of each column is real positive.
    const CMatrix& eigenvectors() const { return eigenvectors_; }
    /// Partition of eigenvalue indices into degenerate levels (ascending).
    const std::vector<std::vector<int>>& clusters() const { return clusters_; }
    /// Mean eigenvalue per level, ascending; size m+1.
    const RVector& level_energies() const { return level_energies_; }
    /// Multiplicity of each level.
    const std::vector<int>& level_ranks() const { return level_ranks_; }
    /// Level index owning eigenvalue index k.
    int level_of(int k) const { return level_of_[static_cast<std::size_t>(k)]; }

    /// Rank-r_i projector onto level i.
    const CMatrix& projector(int level) const {
        return projectors_[static_cast<std::size_t>(level)];
    }

    /// Bohr frequency between distinct levels, omega_ij = E_i - E_j.
    double bohr(int i, int j) const { return bohr_(i, j); }
    const RMatrix& bohr_matrix() const { return bohr_; }

    /// Reconstruction sum_i E_i Pi_i with the level-mean energies.
    CMatrix reconstruct() const;
    /// Same reconstruction wrapped as an operator (the Hamiltonian as this
    /// decomposition represents it).
    HermitianOperator hamiltonian() const;

  private:
    RVector eigenvalues_;
    CMatrix eigenvectors_;
    std::vector<std::vector<int>> clusters_;
    std::vector<int> level_ranks_;
    std::vector<int> level_of_;
    RVector level_energies_;
    std::vector<CMatrix> projectors_;
    RMatrix bohr_;
};

/// One positive Bohr line: omega = E_upper - E_lower with upper > lower.
struct BohrLine {
    int upper = 0;
    int lower = 0;
    double omega = 0.0;
};

/// Two distinct Bohr lines whose frequencies coincide within tolerance.
struct ResonancePair {
    std::pair<int, int> first;
    std::pair<int, int> second;
    double mismatch = 0.0;
};

/// Degeneracy threshold used when none is given: a 1e-9 fraction of the
/// spectral range, padded with a few ulps so exactly repeated eigenvalues
/// of a trivial spectrum still merge.
double default_degeneracy_tol(const RVector& eigenvalues);

/// Full eigensystem of H. Re-checks hermiticity at hermiticity_tol, then
/// clusters eigenvalues whose adjacent gap is below degeneracy_tol.
/// Throws NonHermitian or ConvergenceFailure.
SpectralDecomposition eigendecompose(const HermitianOperator& H,
                                     double hermiticity_tol,
                                     double degeneracy_tol);

/// eigendecompose with the default tolerances (degeneracy threshold scaled
/// by the spectral range).
SpectralDecomposition eigendecompose(const HermitianOperator& H);

/// All pairwise differences of distinct level energies, (i, j, omega_ij)
/// for i > j, ordered by (i, j) ascending. Intra-level (zero) differences
/// are excluded by construction.
std::vector<BohrLine> bohr_spectrum(const SpectralDecomposition& spec);

/// Every near-equality |omega_ij - omega_kl| < resonance_tol between
/// distinct positive Bohr lines. An empty result certifies pairwise
/// incommensurability at the stated tolerance.
std::vector<ResonancePair> detect_resonances(const SpectralDecomposition& spec,
                                             double resonance_tol);

}  // namespace ergo
