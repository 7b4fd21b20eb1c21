#include "ergo/thermo.hpp"

#include <cmath>
#include <sstream>

namespace ergo {

namespace {

void check_probability_vector(const RVector& p) {
    if (p.size() == 0) {
        throw NotAProbabilityVector("empty vector");
    }
    if (p.minCoeff() < -kProbabilityTol || p.maxCoeff() > 1.0 + kProbabilityTol) {
        std::ostringstream msg;
        msg << "entries outside [0, 1]: min " << p.minCoeff() << ", max "
            << p.maxCoeff();
        throw NotAProbabilityVector(msg.str());
    }
    const double sum = p.sum();
    if (std::abs(sum - 1.0) > kProbabilityTol) {
        std::ostringstream msg;
        msg << "entries sum to " << sum;
        throw NotAProbabilityVector(msg.str());
    }
}

// Von Neumann entropy of the state with level probabilities p: each level k
// spreads p_k uniformly over its r_k-dimensional eigenspace.
double level_entropy(const std::vector<int>& ranks, const RVector& p) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        const double r = ranks[static_cast<std::size_t>(k)];
        const double w = p[k] / r;
        if (w > 0.0) {
            s -= r * w * std::log(w);
        }
    }
    return std::max(s, 0.0);
}

DensityMatrix exponential_state(const ConservedSet& set, double beta,
                                const RVector& mu) {
    if (mu.size() != set.size() - 2) {
        std::ostringstream msg;
        msg << "expected " << set.size() - 2 << " chemical potentials, got "
            << mu.size();
        throw DimensionMismatch(msg.str());
    }
    CMatrix exponent = -beta * set.op(1);
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        exponent -= mu[i] * set.op(2 + static_cast<int>(i));
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(exponent);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceFailure("eigensolver did not converge");
    }
    // Max-shift before exponentiating; the shift cancels against Z.
    const RVector a = solver.eigenvalues();
    const double shift = a.maxCoeff();
    RVector weights = (a.array() - shift).exp();
    weights /= weights.sum();
    return DensityMatrix(solver.eigenvectors() * weights.asDiagonal() *
                         solver.eigenvectors().adjoint());
}

}  // namespace

ConservedSet::ConservedSet(const SpectralDecomposition& spec,
                           std::vector<CMatrix> operators)
    : operators_(std::move(operators)) {
    const int levels = spec.num_levels();
    projectors_.reserve(static_cast<std::size_t>(levels));
    for (int k = 0; k < levels; ++k) {
        projectors_.push_back(spec.projector(k));
    }
    ranks_ = spec.level_ranks();

    const CMatrix h = spec.reconstruct();
    for (std::size_t j = 0; j < operators_.size(); ++j) {
        const CMatrix& g = operators_[j];
        if (g.rows() != spec.dim() || g.cols() != spec.dim()) {
            throw DimensionMismatch("conserved operator dimension mismatch");
        }
        const double comm = max_abs(g * h - h * g);
        if (comm > kCommutatorTol) {
            std::ostringstream msg;
            msg << "operator " << j << " does not commute with H: |[G,H]| = "
                << comm;
            throw NonCommuting(msg.str());
        }
        // Inside a degenerate level the operator must act as a scalar;
        // otherwise it would resolve structure the reduced torus lost.
        for (int k = 0; k < levels; ++k) {
            const auto& members = spec.clusters()[static_cast<std::size_t>(k)];
            const auto r = static_cast<Eigen::Index>(members.size());
            if (r == 1) {
                continue;
            }
            CMatrix block(r, r);
            for (Eigen::Index a = 0; a < r; ++a) {
                for (Eigen::Index b = 0; b < r; ++b) {
                    block(a, b) =
                        spec.eigenvectors()
                            .col(members[static_cast<std::size_t>(a)])
                            .adjoint() *
                        g *
                        spec.eigenvectors()
                            .col(members[static_cast<std::size_t>(b)]);
                }
            }
            const Complex mean = block.trace() / static_cast<double>(r);
            block -= mean * CMatrix::Identity(r, r);
            if (max_abs(block) > kCommutatorTol) {
                std::ostringstream msg;
                msg << "operator " << j << " is not scalar on degenerate level "
                    << k;
                throw NonCommuting(msg.str());
            }
        }
    }

    const auto count = static_cast<Eigen::Index>(operators_.size());
    gram_.resize(levels, count);
    for (int i = 0; i < levels; ++i) {
        for (Eigen::Index j = 0; j < count; ++j) {
            gram_(i, j) =
                (projectors_[static_cast<std::size_t>(i)] *
                 operators_[static_cast<std::size_t>(j)])
                    .trace()
                    .real();
        }
    }

    Eigen::FullPivLU<RMatrix> lu(gram_);
    if (!lu.isInvertible()) {
        throw SingularGram(
            "Gram matrix is singular: the conserved operators are linearly "
            "dependent");
    }
    gram_inverse_ = lu.inverse();
}

ConservedSet ConservedSet::default_set(const SpectralDecomposition& spec) {
    if (spec.num_levels() < 2) {
        throw DegenerateTrivial(
            "single distinct eigenvalue: H is a multiple of the identity");
    }
    std::vector<CMatrix> ops;
    ops.reserve(static_cast<std::size_t>(spec.num_levels()));
    ops.push_back(CMatrix::Identity(spec.dim(), spec.dim()));
    ops.push_back(spec.reconstruct());
    for (int k = 2; k < spec.num_levels(); ++k) {
        ops.push_back(spec.projector(k));
    }
    return ConservedSet(spec, std::move(ops));
}

ConservedSet ConservedSet::with_observables(
    const SpectralDecomposition& spec,
    const std::vector<HermitianOperator>& observables) {
    if (spec.num_levels() < 2) {
        throw DegenerateTrivial(
            "single distinct eigenvalue: H is a multiple of the identity");
    }
    if (static_cast<int>(observables.size()) != spec.m() - 1) {
        std::ostringstream msg;
        msg << "need " << spec.m() - 1 << " observables to complete {1, H}, got "
            << observables.size();
        throw DimensionMismatch(msg.str());
    }
    std::vector<CMatrix> ops;
    ops.reserve(observables.size() + 2);
    ops.push_back(CMatrix::Identity(spec.dim(), spec.dim()));
    ops.push_back(spec.reconstruct());
    for (const auto& f : observables) {
        ops.push_back(f.matrix());
    }
    return ConservedSet(spec, std::move(ops));
}

double ThermoSolution::dual_residual() const {
    return max_abs(equilibrium.matrix() - grand_canonical.matrix());
}

double DifferentialReport::max_abs_residual() const {
    return residuals.size() == 0 ? 0.0 : residuals.cwiseAbs().maxCoeff();
}

RVector conserved_values(const ConservedSet& set, const RVector& p) {
    if (p.size() != set.size()) {
        throw DimensionMismatch("probability vector does not match set size");
    }
    const auto& ranks = set.level_ranks();
    RVector values = RVector::Zero(set.size());
    for (int j = 0; j < set.size(); ++j) {
        double acc = 0.0;
        for (int k = 0; k < set.size(); ++k) {
            acc += p[k] / ranks[static_cast<std::size_t>(k)] * set.gram()(k, j);
        }
        values[j] = acc;
    }
    return values;
}

RVector probabilities_from_values(const ConservedSet& set, const RVector& G) {
    if (G.size() != set.size()) {
        throw DimensionMismatch("value vector does not match set size");
    }
    if (std::abs(G[0] - 1.0) > kFeasibilityTol) {
        std::ostringstream msg;
        msg << "G_0 = " << G[0] << " but the identity expectation must be 1";
        throw InfeasibleValues(msg.str());
    }
    const RVector w = set.gram_inverse().transpose() * G;
    RVector p(set.size());
    for (int k = 0; k < set.size(); ++k) {
        p[k] = w[k] * set.level_ranks()[static_cast<std::size_t>(k)];
        if (p[k] < -kFeasibilityTol || p[k] > 1.0 + kFeasibilityTol) {
            std::ostringstream msg;
            msg << "reconstructed probability p_" << k << " = " << p[k]
                << " is outside [0, 1]: the requested expectation values are "
                   "not achievable by any state";
            throw InfeasibleValues(msg.str());
        }
    }
    return p;
}

double entropy(const RVector& p) {
    check_probability_vector(p);
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            s -= p[i] * std::log(p[i]);
        }
    }
    return std::max(s, 0.0);
}

ThermoSolution conjugate_variables(const ConservedSet& set, const RVector& p) {
    if (p.size() != set.size()) {
        throw DimensionMismatch("probability vector does not match set size");
    }
    check_probability_vector(p);
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        if (p[k] <= 0.0) {
            std::ostringstream msg;
            msg << "p_" << k << " = " << p[k]
                << ": conjugate variables diverge on the simplex boundary";
            throw BoundaryState(msg.str());
        }
    }

    const auto& ranks = set.level_ranks();
    const int levels = set.size();

    // gamma_i = -sum_k r_k h_ik (ln w_k + 1), w_k = p_k / r_k. The rank
    // factors are the degenerate-level multiplicities; for a nondegenerate
    // spectrum this is the plain contraction against h.
    RVector u(levels);
    for (int k = 0; k < levels; ++k) {
        const double r = ranks[static_cast<std::size_t>(k)];
        u[k] = r * (std::log(p[k] / r) + 1.0);
    }
    const RVector gamma = -(set.gram_inverse() * u);

    CMatrix luders = CMatrix::Zero(set.dim(), set.dim());
    for (int k = 0; k < levels; ++k) {
        luders += p[k] / ranks[static_cast<std::size_t>(k)] * set.projector(k);
    }

    const double beta = gamma[1];
    const RVector mu = gamma.tail(levels - 2);

    ThermoSolution solution{
        p,
        level_entropy(ranks, p),
        gamma,
        beta,
        mu,
        gamma[0] + 1.0,
        DensityMatrix(std::move(luders)),
        exponential_state(set, beta, mu),
    };
    return solution;
}

DensityMatrix grand_canonical(const SpectralDecomposition& spec,
                              const ConservedSet& set, double beta,
                              const RVector& mu) {
    if (spec.dim() != set.dim()) {
        throw DimensionMismatch("decomposition and conserved set disagree");
    }
    return exponential_state(set, beta, mu);
}

double two_level_beta(double E, double E0, double E1) {
    if (!(E0 < E && E < E1)) {
        std::ostringstream msg;
        msg << "E = " << E << " must lie strictly inside (" << E0 << ", " << E1
            << ")";
        throw OutOfRange(msg.str());
    }
    return std::log((E1 - E) / (E - E0)) / (E1 - E0);
}

double two_level_energy(double beta, double E0, double E1) {
    const double a = -beta * E0;
    const double b = -beta * E1;
    const double shift = std::max(a, b);
    const double ea = std::exp(a - shift);
    const double eb = std::exp(b - shift);
    return (E0 * ea + E1 * eb) / (ea + eb);
}

double degenerate_three_level_energy(double beta, double E0, double E1) {
    const double a = -beta * E0;
    const double b = -beta * E1;
    const double shift = std::max(a, b);
    const double ea = std::exp(a - shift);
    const double eb = std::exp(b - shift);
    return (E0 * ea + 2.0 * E1 * eb) / (ea + 2.0 * eb);
}

DifferentialReport thermo_differential_check(const ConservedSet& set,
                                             const RVector& p, double step) {
    if (step <= 0.0) {
        throw OutOfRange("finite-difference step must be positive");
    }
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        if (p[k] <= 0.0 || p[k] >= 1.0) {
            throw BoundaryState("p must be strictly interior");
        }
    }
    const ThermoSolution base = conjugate_variables(set, p);
    const RVector G = conserved_values(set, p);
    const int coords = set.size() - 1;  // E, F_2 .. F_m

    RVector fd(coords);
    for (int j = 1; j <= coords; ++j) {
        RVector gp = G;
        RVector gm = G;
        gp[j] += step;
        gm[j] -= step;
        RVector pp;
        RVector pm;
        try {
            pp = probabilities_from_values(set, gp);
            pm = probabilities_from_values(set, gm);
        } catch (const InfeasibleValues&) {
            throw BoundaryState(
                "perturbed conserved values leave the probability simplex; "
                "reduce the step or move p away from the boundary");
        }
        if (pp.minCoeff() <= 0.0 || pm.minCoeff() <= 0.0) {
            throw BoundaryState(
                "perturbed probabilities touch the simplex boundary");
        }
        fd[j - 1] = (level_entropy(set.level_ranks(), pp) -
                     level_entropy(set.level_ranks(), pm)) /
                    (2.0 * step);
    }

    DifferentialReport report;
    report.analytic = base.gamma.tail(coords);
    report.finite_difference = fd;
    report.residuals = fd - report.analytic;
    return report;
}

}  // namespace ergo
