#include "ergo/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace ergo {

namespace {

void check_dim(const SpectralDecomposition& spec, Eigen::Index other,
               const char* what) {
    if (spec.dim() != other) {
        std::ostringstream msg;
        msg << what << " has dimension " << other
            << " but the decomposition has " << spec.dim();
        throw DimensionMismatch(msg.str());
    }
}

// Amplitudes in the energy eigenbasis, whatever basis the state came in.
CVector energy_amplitudes(const SpectralDecomposition& spec,
                          const PureState& psi) {
    check_dim(spec, psi.dim(), "state");
    if (psi.basis() == StateBasis::Energy) {
        return psi.amplitudes();
    }
    return spec.eigenvectors().adjoint() * psi.amplitudes();
}

}  // namespace

PureState::PureState(CVector amplitudes, StateBasis basis)
    : amplitudes_(std::move(amplitudes)), basis_(basis) {
    const double norm2 = amplitudes_.squaredNorm();
    if (std::abs(norm2 - 1.0) > kStateNormTol) {
        std::ostringstream msg;
        msg << "state norm^2 = " << norm2 << " is not 1 within "
            << kStateNormTol;
        throw NotNormalized(msg.str());
    }
}

PureState PureState::normalized(CVector amplitudes, StateBasis basis) {
    const double norm = amplitudes.norm();
    if (norm == 0.0) {
        throw NotNormalized("cannot normalize the zero vector");
    }
    return PureState(amplitudes / norm, basis);
}

DensityMatrix::DensityMatrix(CMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw DimensionMismatch("density matrix must be square");
    }
    const double herm = HermitianOperator::asymmetry(entries_);
    if (herm > kDensityTol) {
        std::ostringstream msg;
        msg << "density matrix asymmetry " << herm << " exceeds " << kDensityTol;
        throw NonHermitian(msg.str());
    }
    const double trace_err = std::abs(entries_.trace() - Complex(1.0, 0.0));
    if (trace_err > kDensityTol) {
        std::ostringstream msg;
        msg << "density matrix trace deviates from 1 by " << trace_err;
        throw Error(msg.str());
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(entries_,
                                                  Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceFailure("eigensolver did not converge");
    }
    if (solver.eigenvalues().minCoeff() < -kDensityTol) {
        std::ostringstream msg;
        msg << "density matrix has eigenvalue "
            << solver.eigenvalues().minCoeff() << " below -" << kDensityTol;
        throw Error(msg.str());
    }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

PureState to_energy_basis(const SpectralDecomposition& spec,
                          const PureState& psi) {
    if (psi.basis() == StateBasis::Energy) {
        return psi;
    }
    return PureState(energy_amplitudes(spec, psi), StateBasis::Energy);
}

PureState to_input_basis(const SpectralDecomposition& spec,
                         const PureState& psi) {
    if (psi.basis() == StateBasis::Input) {
        return psi;
    }
    check_dim(spec, psi.dim(), "state");
    return PureState(spec.eigenvectors() * psi.amplitudes(), StateBasis::Input);
}

PureState evolve(const SpectralDecomposition& spec, const PureState& psi0,
                 double t) {
    CVector c = energy_amplitudes(spec, psi0);
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        const double e = spec.level_energies()[spec.level_of(static_cast<int>(k))];
        c[k] *= std::polar(1.0, -e * t);
    }
    if (psi0.basis() == StateBasis::Energy) {
        return PureState(std::move(c), StateBasis::Energy);
    }
    return PureState(spec.eigenvectors() * c, StateBasis::Input);
}

RVector populations(const SpectralDecomposition& spec, const PureState& psi) {
    const CVector c = energy_amplitudes(spec, psi);
    RVector p = RVector::Zero(spec.num_levels());
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        p[spec.level_of(static_cast<int>(k))] += std::norm(c[k]);
    }
    return p;
}

double expectation(const HermitianOperator& O, const PureState& psi) {
    if (O.dim() != psi.dim()) {
        throw DimensionMismatch("observable and state dimension differ");
    }
    const Complex v = psi.amplitudes().adjoint() * O.matrix() * psi.amplitudes();
    return v.real();
}

double finite_time_average(const SpectralDecomposition& spec,
                           const PureState& psi0, const HermitianOperator& O,
                           double T, AveragingMode mode, int steps) {
    if (T <= 0.0) {
        throw NonPositiveHorizon("averaging horizon must be positive");
    }
    check_dim(spec, O.dim(), "observable");

    if (mode == AveragingMode::Quadrature) {
        if (steps < 2) {
            throw OutOfRange("quadrature needs at least 2 steps");
        }
        if (steps % 2 != 0) {
            ++steps;  // Simpson wants an even subinterval count
        }
        const PureState psi_in = to_input_basis(spec, psi0);
        const double h = T / steps;
        double acc = expectation(O, psi_in) +
                     expectation(O, evolve(spec, psi_in, T));
        for (int k = 1; k < steps; ++k) {
            const double w = (k % 2 == 1) ? 4.0 : 2.0;
            acc += w * expectation(O, evolve(spec, psi_in, k * h));
        }
        return acc * h / (3.0 * T);
    }

    // Closed form: block sums A_kl = sum over the levels' members of
    // conj(c_i) c_j O^E_ij, integrated against (exp(i w T) - 1)/(i w T).
    const CVector c = energy_amplitudes(spec, psi0);
    const CMatrix oe =
        spec.eigenvectors().adjoint() * O.matrix() * spec.eigenvectors();
    const int levels = spec.num_levels();
    CMatrix blocks = CMatrix::Zero(levels, levels);
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        for (Eigen::Index j = 0; j < c.size(); ++j) {
            blocks(spec.level_of(static_cast<int>(i)),
                   spec.level_of(static_cast<int>(j))) +=
                std::conj(c[i]) * c[j] * oe(i, j);
        }
    }
    Complex total = 0.0;
    for (int k = 0; k < levels; ++k) {
        for (int l = 0; l < levels; ++l) {
            if (k == l) {
                total += blocks(k, l);
            } else {
                const double w = spec.bohr(k, l);
                const Complex iwt(0.0, w * T);
                total += blocks(k, l) * (std::exp(iwt) - 1.0) / iwt;
            }
        }
    }
    return total.real();
}

DensityMatrix dephase(const SpectralDecomposition& spec,
                      const DensityMatrix& rho0) {
    check_dim(spec, rho0.dim(), "density matrix");
    // Work in the energy basis: zero every element linking distinct levels,
    // keep intra-level blocks whole, transform back.
    CMatrix r =
        spec.eigenvectors().adjoint() * rho0.matrix() * spec.eigenvectors();
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
        for (Eigen::Index j = 0; j < r.cols(); ++j) {
            if (spec.level_of(static_cast<int>(i)) !=
                spec.level_of(static_cast<int>(j))) {
                r(i, j) = Complex(0.0, 0.0);
            }
        }
    }
    return DensityMatrix(spec.eigenvectors() * r *
                         spec.eigenvectors().adjoint());
}

double dynamic_average(const SpectralDecomposition& spec,
                       const PureState& psi0, const HermitianOperator& O) {
    check_dim(spec, O.dim(), "observable");
    const CVector c = energy_amplitudes(spec, psi0);
    const CMatrix oe =
        spec.eigenvectors().adjoint() * O.matrix() * spec.eigenvectors();
    Complex total = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        for (Eigen::Index j = 0; j < c.size(); ++j) {
            if (spec.level_of(static_cast<int>(i)) ==
                spec.level_of(static_cast<int>(j))) {
                total += std::conj(c[i]) * c[j] * oe(i, j);
            }
        }
    }
    return total.real();
}

}  // namespace ergo
