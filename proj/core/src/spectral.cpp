#include "ergo/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ergo {

double max_abs(const CMatrix& m) {
    return m.cwiseAbs().maxCoeff();
}

HermitianOperator::HermitianOperator(CMatrix entries, double hermiticity_tol)
    : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        std::ostringstream msg;
        msg << "operator must be square, got " << entries_.rows() << "x"
            << entries_.cols();
        throw DimensionMismatch(msg.str());
    }
    if (entries_.rows() < 2) {
        throw DimensionMismatch("operator dimension must be at least 2");
    }
    const double asym = asymmetry(entries_);
    if (asym > hermiticity_tol) {
        std::ostringstream msg;
        msg << "max asymmetry " << asym << " exceeds hermiticity tolerance "
            << hermiticity_tol;
        throw NonHermitian(msg.str());
    }
}

HermitianOperator HermitianOperator::identity(Eigen::Index dim) {
    return HermitianOperator(CMatrix::Identity(dim, dim));
}

double HermitianOperator::asymmetry(const CMatrix& m) {
    return max_abs(m - m.adjoint());
}

namespace {

// Align each eigenvector's phase: the largest-magnitude component (lowest
// index on ties) becomes real positive. Makes the decomposition output
// deterministic up to the solver's ordering of degenerate subspaces.
void fix_phases(CMatrix& vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        Eigen::Index pivot = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
            const double mag = std::abs(vectors(r, c));
            if (mag > best + 1e-15) {
                best = mag;
                pivot = r;
            }
        }
        const Complex z = vectors(pivot, c);
        if (std::abs(z) > 0.0) {
            vectors.col(c) *= std::conj(z) / std::abs(z);
        }
    }
}

}  // namespace

SpectralDecomposition::SpectralDecomposition(RVector evals, CMatrix evecs,
                                             double degeneracy_tol)
    : eigenvalues_(std::move(evals)), eigenvectors_(std::move(evecs)) {
    const Eigen::Index n1 = eigenvalues_.size();
    if (eigenvectors_.rows() != n1 || eigenvectors_.cols() != n1) {
        throw DimensionMismatch("eigenvector matrix does not match spectrum");
    }
    for (Eigen::Index k = 0; k + 1 < n1; ++k) {
        if (eigenvalues_[k] > eigenvalues_[k + 1]) {
            throw Error("eigenvalues must be ascending");
        }
    }

    // Merge adjacent eigenvalues whose gap is within the tolerance. The
    // merge chains, so a ladder of sub-tolerance gaps forms one level.
    clusters_.push_back({0});
    for (int k = 1; k < static_cast<int>(n1); ++k) {
        if (eigenvalues_[k] - eigenvalues_[k - 1] <= degeneracy_tol) {
            clusters_.back().push_back(k);
        } else {
            clusters_.push_back({k});
        }
    }

    const int levels = static_cast<int>(clusters_.size());
    level_energies_.resize(levels);
    level_ranks_.resize(static_cast<std::size_t>(levels));
    level_of_.assign(static_cast<std::size_t>(n1), 0);
    projectors_.reserve(static_cast<std::size_t>(levels));
    for (int i = 0; i < levels; ++i) {
        const auto& members = clusters_[static_cast<std::size_t>(i)];
        double mean = 0.0;
        CMatrix proj = CMatrix::Zero(n1, n1);
        for (int k : members) {
            mean += eigenvalues_[k];
            proj += eigenvectors_.col(k) * eigenvectors_.col(k).adjoint();
            level_of_[static_cast<std::size_t>(k)] = i;
        }
        level_energies_[i] = mean / static_cast<double>(members.size());
        level_ranks_[static_cast<std::size_t>(i)] =
            static_cast<int>(members.size());
        projectors_.push_back(std::move(proj));
    }

    bohr_.resize(levels, levels);
    for (int i = 0; i < levels; ++i) {
        for (int j = 0; j < levels; ++j) {
            bohr_(i, j) = level_energies_[i] - level_energies_[j];
        }
    }
}

CMatrix SpectralDecomposition::reconstruct() const {
    CMatrix h = CMatrix::Zero(dim(), dim());
    for (int i = 0; i < num_levels(); ++i) {
        h += level_energies_[i] * projectors_[static_cast<std::size_t>(i)];
    }
    return h;
}

HermitianOperator SpectralDecomposition::hamiltonian() const {
    return HermitianOperator(reconstruct(), 1e-10);
}

double default_degeneracy_tol(const RVector& eigenvalues) {
    const double range = eigenvalues.maxCoeff() - eigenvalues.minCoeff();
    const double scale = eigenvalues.cwiseAbs().maxCoeff();
    return 1e-9 * range + 16.0 * std::numeric_limits<double>::epsilon() * scale;
}

SpectralDecomposition eigendecompose(const HermitianOperator& H,
                                     double hermiticity_tol,
                                     double degeneracy_tol) {
    const double asym = HermitianOperator::asymmetry(H.matrix());
    if (asym > hermiticity_tol) {
        std::ostringstream msg;
        msg << "max asymmetry " << asym << " exceeds hermiticity tolerance "
            << hermiticity_tol;
        throw NonHermitian(msg.str());
    }

    Eigen::SelfAdjointEigenSolver<CMatrix> solver(H.matrix());
    if (solver.info() != Eigen::Success) {
        throw ConvergenceFailure("eigensolver did not converge");
    }
    CMatrix vectors = solver.eigenvectors();
    fix_phases(vectors);
    return SpectralDecomposition(solver.eigenvalues(), std::move(vectors),
                                 degeneracy_tol);
}

SpectralDecomposition eigendecompose(const HermitianOperator& H) {
    Eigen::SelfAdjointEigenSolver<CMatrix> probe(H.matrix(),
                                                 Eigen::EigenvaluesOnly);
    if (probe.info() != Eigen::Success) {
        throw ConvergenceFailure("eigensolver did not converge");
    }
    return eigendecompose(H, kDefaultHermiticityTol,
                          default_degeneracy_tol(probe.eigenvalues()));
}

std::vector<BohrLine> bohr_spectrum(const SpectralDecomposition& spec) {
    std::vector<BohrLine> lines;
    const int levels = spec.num_levels();
    lines.reserve(static_cast<std::size_t>(levels * (levels - 1) / 2));
    for (int i = 1; i < levels; ++i) {
        for (int j = 0; j < i; ++j) {
            lines.push_back({i, j, spec.bohr(i, j)});
        }
    }
    return lines;
}

std::vector<ResonancePair> detect_resonances(const SpectralDecomposition& spec,
                                             double resonance_tol) {
    const auto lines = bohr_spectrum(spec);
    std::vector<ResonancePair> hits;
    for (std::size_t a = 0; a < lines.size(); ++a) {
        for (std::size_t b = a + 1; b < lines.size(); ++b) {
            const double mismatch = std::abs(lines[a].omega - lines[b].omega);
            if (mismatch < resonance_tol) {
                hits.push_back({{lines[a].upper, lines[a].lower},
                                {lines[b].upper, lines[b].lower},
                                mismatch});
            }
        }
    }
    return hits;
}

}  // namespace ergo
