#pragma once

#include "ergo/spectral.hpp"

namespace ergo {

inline constexpr double kStateNormTol = 1e-12;
inline constexpr double kDensityTol = 1e-12;

/// Which basis a state's amplitudes refer to. Input is the basis the
/// Hamiltonian was written in; Energy is the eigenbasis of a decomposition.
enum class StateBasis { Input, Energy };

/// Normalized pure state. The amplitude vector is validated to unit norm at
/// construction and tagged with the basis it lives in.
class PureState {
  public:
    explicit PureState(CVector amplitudes, StateBasis basis = StateBasis::Input);

    /// Normalizes a nonzero vector instead of requiring unit input.
    static PureState normalized(CVector amplitudes,
                                StateBasis basis = StateBasis::Input);

    Eigen::Index dim() const { return amplitudes_.size(); }
    const CVector& amplitudes() const { return amplitudes_; }
    StateBasis basis() const { return basis_; }

  private:
    CVector amplitudes_;
    StateBasis basis_;
};

/// Hermitian, positive-semidefinite, unit-trace matrix. All three
/// properties are validated at construction (psd up to -1e-12 on the
/// smallest eigenvalue).
class DensityMatrix {
  public:
    explicit DensityMatrix(CMatrix entries);

    /// Projector |psi><psi| in the state's own basis.
    static DensityMatrix from_pure(const PureState& psi);

    Eigen::Index dim() const { return entries_.rows(); }
    const CMatrix& matrix() const { return entries_; }

  private:
    CMatrix entries_;
};

/// Basis changes between the input basis and the energy eigenbasis of spec.
PureState to_energy_basis(const SpectralDecomposition& spec,
                          const PureState& psi);
PureState to_input_basis(const SpectralDecomposition& spec,
                         const PureState& psi);

/// |psi_t> = sum_i exp(-i E_i t) Pi_i |psi_0>, with the level-mean energies
/// of the decomposition. The result stays in the basis of the input state.
PureState evolve(const SpectralDecomposition& spec, const PureState& psi0,
                 double t);

/// Level populations p_i = <psi|Pi_i|psi>, one entry per distinct level
/// (size m+1). Nonnegative, sums to one, invariant under evolve.
RVector populations(const SpectralDecomposition& spec, const PureState& psi);

/// <psi|O|psi> with both operands read in the same basis.
double expectation(const HermitianOperator& O, const PureState& psi);

enum class AveragingMode { Analytic, Quadrature };

/// (1/T) * integral over [0, T] of <psi_s|O|psi_s> ds.
///
/// Analytic mode evaluates the closed form: level-diagonal terms enter with
/// weight one, cross terms with kernel (exp(i w T) - 1)/(i w T). Quadrature
/// mode runs composite Simpson with `steps` subintervals (rounded up to an
/// even count) over explicitly evolved states; it exists as the slow
/// cross-check of the analytic path.
double finite_time_average(const SpectralDecomposition& spec,
                           const PureState& psi0, const HermitianOperator& O,
                           double T, AveragingMode mode = AveragingMode::Analytic,
                           int steps = 1024);

/// sum_i Pi_i rho Pi_i: removes matrix elements between distinct levels and
/// keeps intra-level blocks whole. Idempotent, trace preserving, the fixed
/// point of time averaging. rho is read in the input basis.
DensityMatrix dephase(const SpectralDecomposition& spec,
                      const DensityMatrix& rho0);

/// Long-time average of <O>: tr(rho O) with rho the dephased projector of
/// psi0. Equals the T -> infinity limit of finite_time_average.
double dynamic_average(const SpectralDecomposition& spec,
                       const PureState& psi0, const HermitianOperator& O);

}  // namespace ergo
