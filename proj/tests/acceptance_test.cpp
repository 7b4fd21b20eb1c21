// Acceptance gate: every release criterion with its pinned tolerance, one
// pass/fail line each. The binary exits nonzero if any criterion fails.

#include <ergo/dos.hpp>
#include <ergo/dynamics.hpp>
#include <ergo/spectral.hpp>
#include <ergo/thermo.hpp>

#include "support/oracles.hpp"

#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace ergo;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome pass_if(bool ok, const std::string& detail) {
    return {ok, detail};
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// --- criterion 1 ---------------------------------------------------------
// The grand canonical matrix rebuilt from (beta, mu) must equal the
// dephased projector of the initial state entrywise within 1e-9.
Outcome theorem_identity() {
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index dim = 2 + trial % 7;
        const CMatrix h = testsupport::random_hermitian(dim, rng);
        const auto spec = eigendecompose(HermitianOperator(h, 1e-10));
        const PureState psi =
            testsupport::random_interior_state(spec, rng, 1e-3);

        const auto set = ConservedSet::default_set(spec);
        const ThermoSolution sol =
            conjugate_variables(set, populations(spec, psi));
        const DensityMatrix dephased =
            dephase(spec, DensityMatrix::from_pure(psi));
        worst = std::max(
            worst,
            max_abs(sol.grand_canonical.matrix() - dephased.matrix()));
    }
    return pass_if(worst < 1e-9, "max entrywise residual " + fmt(worst) +
                                     " (tol 1e-9, 200 instances, dims 2-8)");
}

// --- criterion 2 ---------------------------------------------------------
// Finite-time averages converge to the long-time limit inside the
// oscillatory 1/T envelope, and the oscillation peak drops by >= 8x per
// decade of horizon.
Outcome convergence_envelope() {
    std::mt19937_64 rng(1002);
    double worst_excess = 0.0;
    double worst_ratio = 1e300;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index dim = 3 + trial % 4;
        const CMatrix h = testsupport::random_hermitian(dim, rng);
        const auto spec = eigendecompose(HermitianOperator(h, 1e-10));
        if (spec.num_levels() != spec.dim()) {
            continue;  // keep the nondegenerate premise
        }
        const HermitianOperator obs(testsupport::random_hermitian(dim, rng));
        const PureState psi = testsupport::random_state(dim, rng);

        const CVector c = spec.eigenvectors().adjoint() * psi.amplitudes();
        const CMatrix oe =
            spec.eigenvectors().adjoint() * obs.matrix() * spec.eigenvectors();
        double envelope = 0.0;
        double min_omega = 1e300;
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                if (i == j) {
                    continue;
                }
                const double w = std::abs(spec.bohr(static_cast<int>(i),
                                                    static_cast<int>(j)));
                envelope +=
                    2.0 * std::abs(std::conj(c[i]) * c[j] * oe(i, j)) / w;
                min_omega = std::min(min_omega, w);
            }
        }

        const double limit = dynamic_average(spec, psi, obs);
        const auto gap = [&](double T) {
            return std::abs(finite_time_average(spec, psi, obs, T) - limit);
        };
        // Oscillation peak at horizon scale T: sample one octave above T.
        const auto peak = [&](double T) {
            double p = 0.0;
            for (int k = 0; k < 8; ++k) {
                p = std::max(p, gap(T * (1.0 + k / 8.0)));
            }
            return p;
        };

        const double t_star = 1e3 / min_omega;
        worst_excess = std::max(worst_excess,
                                gap(t_star) / (envelope / t_star));
        worst_ratio = std::min(worst_ratio, peak(t_star) / peak(10.0 * t_star));
    }
    const bool ok = worst_excess <= 1.0 && worst_ratio >= 8.0;
    return pass_if(ok, "max gap/envelope " + fmt(worst_excess) +
                           " (<= 1), min decade peak ratio " +
                           fmt(worst_ratio) + " (>= 8, 50 instances)");
}

// --- criterion 3 ---------------------------------------------------------
Outcome two_level_inverse_pair() {
    double worst = 0.0;
    for (const auto& [e0, e1] :
         std::vector<std::pair<double, double>>{{0.0, 1.0}, {-0.75, 1.5}}) {
        for (int k = 1; k <= 100; ++k) {
            const double e = e0 + (e1 - e0) * k / 101.0;
            worst = std::max(
                worst,
                std::abs(two_level_energy(two_level_beta(e, e0, e1), e0, e1) -
                         e));
        }
        worst = std::max(worst,
                         std::abs(two_level_beta(0.5 * (e0 + e1), e0, e1)));
    }
    return pass_if(worst <= 1e-12, "max |round trip error| " + fmt(worst) +
                                       " (tol 1e-12, 100-point grids)");
}

// --- criterion 4 ---------------------------------------------------------
Outcome degenerate_three_level() {
    const double at_zero = degenerate_three_level_energy(0.0, 0.0, 1.0);
    const double mean_err = std::abs(at_zero - 2.0 / 3.0);

    const auto spec = eigendecompose(HermitianOperator(
        (CMatrix(3, 3) << 0, 0, 0, 0, 1, 0, 0, 0, 1).finished()));
    const auto set = ConservedSet::default_set(spec);
    double worst = 0.0;
    for (double target : {0.2, 0.55, 0.8}) {
        const double p0 = 1.0 - target;
        RVector level_p(2);
        level_p << p0, target;

        double lo = -60.0;
        double hi = 60.0;
        while (hi - lo > 1e-13) {
            const double mid = 0.5 * (lo + hi);
            if (degenerate_three_level_energy(mid, 0.0, 1.0) > target) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        const double beta_inverted = 0.5 * (lo + hi);
        const double beta_pipeline = conjugate_variables(set, level_p).beta;
        worst = std::max(worst, std::abs(beta_pipeline - beta_inverted));
    }
    const bool ok = mean_err <= 1e-12 && worst <= 1e-8;
    return pass_if(ok, "mean energy at beta=0 err " + fmt(mean_err) +
                           " (tol 1e-12), pipeline vs inversion " +
                           fmt(worst) + " (tol 1e-8)");
}

// --- criterion 5 ---------------------------------------------------------
// Central differences of the entropy along each conserved coordinate match
// the conjugate variables to 1e-5 relative (absolute floor 1 on the scale).
Outcome conjugacy_differentials() {
    std::mt19937_64 rng(1005);
    std::exponential_distribution<double> expo(1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index dim = 2 + trial % 5;
        const CMatrix h = testsupport::random_hermitian(dim, rng);
        const auto spec = eigendecompose(HermitianOperator(h, 1e-10));
        const auto set = ConservedSet::default_set(spec);

        RVector p(spec.num_levels());
        do {
            for (Eigen::Index k = 0; k < p.size(); ++k) {
                p[k] = expo(rng);
            }
            p /= p.sum();
        } while (p.minCoeff() < 0.02);

        const auto report = thermo_differential_check(set, p, 1e-5);
        for (Eigen::Index j = 0; j < report.residuals.size(); ++j) {
            const double scale = std::max(std::abs(report.analytic[j]), 1.0);
            worst = std::max(worst, std::abs(report.residuals[j]) / scale);
        }
    }
    return pass_if(worst <= 1e-5, "max scaled residual " + fmt(worst) +
                                      " (tol 1e-5, 50 instances, dims 2-6)");
}

// --- criterion 6 ---------------------------------------------------------
Outcome density_of_states() {
    struct Run {
        int n;
        int bins;
        double rel_tol;
    };
    std::ostringstream detail;
    bool ok = true;
    for (const Run& run : {Run{1, 64, 0.03}, Run{2, 16, 0.05}, Run{3, 8, 0.10}}) {
        const auto hist = estimate_dos(run.n, run.bins, 1000000, 42, 4);
        const double target = std::pow(kPi, run.n);
        double worst_rel = 0.0;
        for (std::size_t b = 0; b < hist.bin_count(); ++b) {
            if (hist.bin_interior(b)) {
                worst_rel = std::max(
                    worst_rel, std::abs(hist.estimate(b) - target) / target);
            }
        }
        double sigma2 = 0.0;
        const double vol = std::pow(1.0 / run.bins, run.n);
        for (std::size_t b = 0; b < hist.bin_count(); ++b) {
            const double se = hist.std_error(b) * vol;
            sigma2 += se * se;
        }
        const double mass_err =
            std::abs(hist.total_mass() - DoSHistogram::target_mass(run.n));
        const bool mass_ok =
            mass_err <= std::max(3.0 * std::sqrt(sigma2), 1e-12);
        ok = ok && worst_rel <= run.rel_tol && mass_ok;
        detail << "n=" << run.n << " worst " << fmt(worst_rel) << " (tol "
               << fmt(run.rel_tol) << ") mass err " << fmt(mass_err) << "; ";
    }
    return pass_if(ok, detail.str() + "1e6 samples each");
}

// --- criterion 7 ---------------------------------------------------------
Outcome invariant_suites() {
    std::mt19937_64 rng(1007);
    std::ostringstream detail;
    bool ok = true;

    // Dephasing: idempotent, trace preserving. Evolution: norm and group
    // law. Populations: constant along the flow.
    double worst_deph = 0.0;
    double worst_norm = 0.0;
    double worst_group = 0.0;
    double worst_pop = 0.0;
    std::uniform_real_distribution<double> times(-4.0, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index dim = 2 + trial % 5;
        const CMatrix h = testsupport::random_hermitian(dim, rng);
        const auto spec = eigendecompose(HermitianOperator(h, 1e-10));
        const PureState psi = testsupport::random_state(dim, rng);

        const DensityMatrix rho = DensityMatrix::from_pure(psi);
        const DensityMatrix once = dephase(spec, rho);
        worst_deph = std::max(
            worst_deph, max_abs(dephase(spec, once).matrix() - once.matrix()));
        worst_deph = std::max(worst_deph,
                              std::abs(once.matrix().trace().real() - 1.0));

        const double s = times(rng);
        const double t = times(rng);
        const PureState at_t = evolve(spec, psi, t);
        worst_norm =
            std::max(worst_norm, std::abs(at_t.amplitudes().norm() - 1.0));
        worst_group = std::max(
            worst_group,
            testsupport::phase_free_distance(evolve(spec, at_t, s),
                                             evolve(spec, psi, s + t)));
        worst_pop = std::max(worst_pop,
                             (populations(spec, psi) - populations(spec, at_t))
                                 .cwiseAbs()
                                 .maxCoeff());
    }
    ok = ok && worst_deph < 1e-12 && worst_norm < 1e-12 &&
         worst_group < 1e-10 && worst_pop < 1e-12;
    detail << "dephasing " << fmt(worst_deph) << ", norm " << fmt(worst_norm)
           << ", group " << fmt(worst_group) << ", populations "
           << fmt(worst_pop);

    // Probability/value round trip.
    std::exponential_distribution<double> expo(1.0);
    double worst_round = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index dim = 2 + trial % 5;
        const CMatrix h = testsupport::random_hermitian(dim, rng);
        const auto spec = eigendecompose(HermitianOperator(h, 1e-10));
        const auto set = ConservedSet::default_set(spec);
        RVector p(spec.num_levels());
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            p[k] = expo(rng) + 1e-3;
        }
        p /= p.sum();
        const RVector back =
            probabilities_from_values(set, conserved_values(set, p));
        worst_round = std::max(worst_round, (back - p).cwiseAbs().maxCoeff());
    }
    ok = ok && worst_round < 1e-12;
    detail << ", round trip " << fmt(worst_round);

    // A linearly dependent family must be rejected.
    bool singular_thrown = false;
    try {
        const auto spec = eigendecompose(HermitianOperator(
            (CMatrix(3, 3) << 0, 0, 0, 0, 1, 0, 0, 0, 3).finished()));
        const CMatrix dependent =
            0.5 * spec.reconstruct() - 2.0 * CMatrix::Identity(3, 3);
        ConservedSet::with_observables(spec,
                                       {HermitianOperator(dependent, 1e-10)});
    } catch (const SingularGram&) {
        singular_thrown = true;
    }
    ok = ok && singular_thrown;
    detail << ", singular-gram " << (singular_thrown ? "thrown" : "MISSING");

    // Seeded Monte Carlo merges deterministically.
    const auto a = estimate_dos(2, 8, 30000, 9, 1);
    const auto b = estimate_dos(2, 8, 30000, 9, 4);
    const auto c = estimate_dos(2, 8, 30000, 10, 1);
    const bool merge_ok = a.counts() == b.counts() && a.counts() != c.counts();
    ok = ok && merge_ok;
    detail << ", seeded merge " << (merge_ok ? "deterministic" : "BROKEN");

    return pass_if(ok, detail.str());
}

// --- criterion 8 ---------------------------------------------------------
Outcome embedded_goldens() {
    std::ostringstream detail;
    bool ok = true;

    // Flat density on the triangle.
    RVector p2(2);
    p2 << 0.2, 0.3;
    ok = ok && analytic_dos(2, p2) == kPi * kPi;
    p2 << 0.6, 0.6;
    ok = ok && analytic_dos(2, p2) == 0.0;
    detail << "triangle density pi^2 " << (ok ? "exact" : "WRONG");

    // Support indicator of the two-level energy density.
    const double e0 = 0.3;
    const double e1 = 1.8;
    const auto energy_density = [&](double e) {
        RVector coord(1);
        coord << (e1 - e) / (e1 - e0);
        return analytic_dos(1, coord) / (e1 - e0);
    };
    bool support_ok = true;
    for (double e : {0.4, 1.0, 1.75}) {
        support_ok =
            support_ok && std::abs(energy_density(e) - kPi / (e1 - e0)) == 0.0;
    }
    for (double e : {0.2, 0.3, 1.8, 1.9}) {
        support_ok = support_ok && energy_density(e) == 0.0;
    }
    ok = ok && support_ok;
    detail << ", energy support " << (support_ok ? "exact" : "WRONG");

    // Canonical two-level diagonal and its linear-in-energy form.
    const auto spec = eigendecompose(HermitianOperator(
        (CMatrix(2, 2) << e0, 0, 0, e1).finished()));
    const auto set = ConservedSet::default_set(spec);
    const double beta = 0.8;
    const DensityMatrix rho = grand_canonical(spec, set, beta, RVector(0));
    const double z = std::exp(-beta * e0) + std::exp(-beta * e1);
    const double canon_err = std::max(
        std::abs(rho.matrix()(0, 0).real() - std::exp(-beta * e0) / z),
        std::abs(rho.matrix()(1, 1).real() - std::exp(-beta * e1) / z));

    const double e = 0.9;
    RVector values(2);
    values << 1.0, e;
    const RVector lin = probabilities_from_values(set, values);
    const double lin_err =
        std::max(std::abs(lin[0] - (e1 - e) / (e1 - e0)),
                 std::abs(lin[1] - (e - e0) / (e1 - e0)));
    ok = ok && canon_err < 1e-14 && lin_err < 1e-14;
    detail << ", canonical diagonal err " << fmt(canon_err)
           << ", linear form err " << fmt(lin_err);

    return pass_if(ok, detail.str());
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> gates =
        {
            {"grand canonical form equals the dephased state",
             theorem_identity},
            {"finite-time averages obey the 1/T envelope",
             convergence_envelope},
            {"two-level beta/energy closed forms are mutual inverses",
             two_level_inverse_pair},
            {"degenerate three-level pipeline matches its closed form",
             degenerate_three_level},
            {"entropy differentials equal beta and the chemical potentials",
             conjugacy_differentials},
            {"density of states is flat at pi^n with the exact total mass",
             density_of_states},
            {"invariant property suites hold", invariant_suites},
            {"embedded analytic goldens reproduce exactly", embedded_goldens},
        };

    bool all_pass = true;
    int id = 0;
    for (const auto& [name, gate] : gates) {
        ++id;
        Outcome outcome;
        try {
            outcome = gate();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        all_pass = all_pass && outcome.pass;
        std::printf("[%s] criterion %d: %s - %s\n",
                    outcome.pass ? "PASS" : "FAIL", id, name.c_str(),
                    outcome.detail.c_str());
    }
    return all_pass ? 0 : 1;
}
