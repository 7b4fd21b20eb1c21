#include <CLI11.hpp>

#include <ergo/dos.hpp>
#include <ergo/dynamics.hpp>
#include <ergo/spectral.hpp>
#include <ergo/thermo.hpp>

#include "csv.hpp"
#include "problem.hpp"

#include <cmath>
#include <iostream>
#include <thread>

namespace {

using namespace ergo;
using cli::format_double;

void print_matrix(std::ostream& out, const CMatrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out << " ";
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out << " (" << format_double(m(r, c).real()) << ", "
                << format_double(m(r, c).imag()) << ")";
        }
        out << "\n";
    }
}

// Entropy of the equilibrium state at level resolution: level k spreads its
// probability uniformly over a rank-r_k eigenspace. Boundary-safe.
double occupied_entropy(const SpectralDecomposition& spec, const RVector& p) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        const double r = spec.level_ranks()[static_cast<std::size_t>(k)];
        if (p[k] > 0.0) {
            s -= p[k] * std::log(p[k] / r);
        }
    }
    return std::max(s, 0.0);
}

struct AnalyzeSetup {
    SpectralDecomposition spec;
    PureState psi;
    double resonance_tol;
    double degeneracy_tol;
};

AnalyzeSetup decompose_problem(const cli::ProblemFile& problem) {
    const HermitianOperator h(problem.hamiltonian,
                              problem.tolerances.hermiticity);
    Eigen::SelfAdjointEigenSolver<CMatrix> probe(h.matrix(),
                                                 Eigen::EigenvaluesOnly);
    if (probe.info() != Eigen::Success) {
        throw ConvergenceFailure("eigensolver did not converge");
    }
    const double degeneracy =
        cli::resolve_degeneracy_tol(problem.tolerances, probe.eigenvalues());
    return AnalyzeSetup{
        eigendecompose(h, problem.tolerances.hermiticity, degeneracy),
        PureState(problem.initial_state), problem.tolerances.resonance,
        degeneracy};
}

void cmd_analyze(const std::string& path) {
    const cli::ProblemFile problem =
        cli::load_problem(path, cli::env_tolerances());
    const AnalyzeSetup setup = decompose_problem(problem);
    const SpectralDecomposition& spec = setup.spec;
    std::ostream& out = std::cout;

    out << "problem: " << path << "\n";
    out << "tolerances: hermiticity="
        << format_double(problem.tolerances.hermiticity)
        << " degeneracy=" << format_double(setup.degeneracy_tol)
        << " resonance=" << format_double(setup.resonance_tol) << "\n";
    out << "dimension: " << spec.dim() << "\n";
    out << "distinct levels: " << spec.num_levels() << "\n\n";

    const RVector p = populations(spec, setup.psi);
    for (int k = 0; k < spec.num_levels(); ++k) {
        out << "level " << k << ": energy="
            << format_double(spec.level_energies()[k]) << " multiplicity="
            << spec.level_ranks()[static_cast<std::size_t>(k)]
            << " population=" << format_double(p[k]) << "\n";
    }
    out << "\n";

    const auto resonances = detect_resonances(spec, setup.resonance_tol);
    if (resonances.empty()) {
        out << "resonances: none\n";
    } else {
        out << "resonances: " << resonances.size() << "\n";
        for (const auto& r : resonances) {
            out << "  omega(" << r.first.first << "," << r.first.second
                << ") ~ omega(" << r.second.first << "," << r.second.second
                << ") within " << format_double(r.mismatch) << "\n";
        }
    }

    out << "entropy: " << format_double(occupied_entropy(spec, p)) << "\n";

    const DensityMatrix luders =
        dephase(spec, DensityMatrix::from_pure(setup.psi));

    bool have_thermo = false;
    try {
        const ConservedSet set = ConservedSet::default_set(spec);
        const ThermoSolution sol = conjugate_variables(set, p);
        have_thermo = true;

        out << "beta: " << format_double(sol.beta) << "\n";
        if (sol.chemical_potentials.size() == 0) {
            out << "chemical_potentials: none\n";
        } else {
            out << "chemical_potentials:";
            for (Eigen::Index i = 0; i < sol.chemical_potentials.size(); ++i) {
                out << " mu_" << i + 2 << "="
                    << format_double(sol.chemical_potentials[i]);
            }
            out << "\n";
        }
        out << "log_partition: " << format_double(sol.log_partition) << "\n";
        out << "equilibrium density matrix (Lueders form):\n";
        print_matrix(out, luders.matrix());
        out << "grand canonical density matrix:\n";
        print_matrix(out, sol.grand_canonical.matrix());
        out << "dual_representation_residual: "
            << format_double(
                   max_abs(luders.matrix() - sol.grand_canonical.matrix()))
            << "\n";
    } catch (const BoundaryState& e) {
        out << "conjugate variables: unavailable (boundary state: " << e.what()
            << ")\n";
    } catch (const DegenerateTrivial& e) {
        out << "conjugate variables: unavailable (trivial spectrum: "
            << e.what() << ")\n";
    }
    if (!have_thermo) {
        out << "equilibrium density matrix (Lueders form):\n";
        print_matrix(out, luders.matrix());
    }

    for (const auto& [name, matrix] : problem.custom_observables) {
        const HermitianOperator obs(matrix, problem.tolerances.hermiticity);
        out << "observable " << name << ": dynamic_average="
            << format_double(dynamic_average(spec, setup.psi, obs)) << "\n";
    }
}

void cmd_evolve(const std::string& path, const std::string& observable,
                double t_max, int points) {
    const cli::ProblemFile problem =
        cli::load_problem(path, cli::env_tolerances());
    const AnalyzeSetup setup = decompose_problem(problem);

    const CMatrix* matrix = nullptr;
    for (const auto& [name, m] : problem.custom_observables) {
        if (name == observable) {
            matrix = &m;
        }
    }
    if (matrix == nullptr) {
        throw UnknownObservable("observable '" + observable +
                                "' is not defined in the problem file");
    }
    if (t_max <= 0.0) {
        throw NonPositiveHorizon("--t-max must be positive");
    }
    if (points < 1) {
        throw OutOfRange("--points must be at least 1");
    }
    const HermitianOperator obs(*matrix, problem.tolerances.hermiticity);
    const double limit = dynamic_average(setup.spec, setup.psi, obs);

    std::cout << "T,finite_time_average,dynamic_average,abs_gap\n";
    for (int k = 1; k <= points; ++k) {
        const double t = t_max * k / points;
        const double avg = finite_time_average(setup.spec, setup.psi, obs, t);
        std::cout << format_double(t) << "," << format_double(avg) << ","
                  << format_double(limit) << ","
                  << format_double(std::abs(avg - limit)) << "\n";
    }
}

void cmd_dos(int n, int bins, std::uint64_t samples, std::uint64_t seed) {
    if (n < 1 || n > 6) {
        throw OutOfRangeDimension("--n must lie in [1, 6]");
    }
    if (bins < 2) {
        throw OutOfRange("--bins must be at least 2");
    }
    double total_bins = 1.0;
    for (int axis = 0; axis < n; ++axis) {
        total_bins *= bins;
    }
    if (total_bins > 16e6) {
        throw OutOfRange("bins^n exceeds the 16M-bin budget");
    }

    const unsigned hw = std::thread::hardware_concurrency();
    const int chunks = static_cast<int>(std::clamp(hw, 1u, 8u));
    const DoSHistogram hist = estimate_dos(n, bins, samples, seed, chunks);

    for (int axis = 0; axis < n; ++axis) {
        std::cout << "p" << axis << ",";
    }
    std::cout << "estimate,std_error\n";
    for (std::size_t b = 0; b < hist.bin_count(); ++b) {
        for (double c : hist.bin_center(b)) {
            std::cout << format_double(c) << ",";
        }
        std::cout << format_double(hist.estimate(b)) << ","
                  << format_double(hist.std_error(b)) << "\n";
    }
    std::cout << "total_mass," << format_double(hist.total_mass()) << ",target,"
              << format_double(DoSHistogram::target_mass(n)) << "\n";
}

void cmd_twolevel(double e0, double e1, const double* energy,
                  const double* beta_in) {
    if (!(e0 < e1)) {
        throw OutOfRange("--e0 must be strictly below --e1");
    }
    double beta = 0.0;
    double e = 0.0;
    if (energy != nullptr) {
        e = *energy;
        beta = two_level_beta(e, e0, e1);
    } else {
        beta = *beta_in;
        e = two_level_energy(beta, e0, e1);
    }
    const double p0 = (e1 - e) / (e1 - e0);
    const double p1 = (e - e0) / (e1 - e0);
    double s = 0.0;
    if (p0 > 0.0) {
        s -= p0 * std::log(p0);
    }
    if (p1 > 0.0) {
        s -= p1 * std::log(p1);
    }
    const double a = -beta * e0;
    const double b = -beta * e1;
    const double shift = std::max(a, b);
    const double log_z =
        shift + std::log(std::exp(a - shift) + std::exp(b - shift));

    std::cout << "quantity,value\n";
    std::cout << "e0," << format_double(e0) << "\n";
    std::cout << "e1," << format_double(e1) << "\n";
    std::cout << "energy," << format_double(e) << "\n";
    std::cout << "beta," << format_double(beta) << "\n";
    std::cout << "p0," << format_double(p0) << "\n";
    std::cout << "p1," << format_double(p1) << "\n";
    std::cout << "entropy," << format_double(std::max(s, 0.0)) << "\n";
    std::cout << "log_partition," << format_double(log_z) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "ergo: dynamic averages and equilibrium thermodynamics of closed "
        "finite-dimensional quantum systems"};
    app.require_subcommand(1);

    std::string analyze_path;
    auto* analyze =
        app.add_subcommand("analyze", "full equilibrium report for a problem");
    analyze->add_option("file", analyze_path, "problem file (JSON)")
        ->required();
    analyze->callback([&]() { cmd_analyze(analyze_path); });

    std::string evolve_path;
    std::string evolve_observable;
    double evolve_tmax = 10.0;
    int evolve_points = 100;
    auto* evolve = app.add_subcommand(
        "evolve", "finite-time averages of a named observable (CSV)");
    evolve->add_option("file", evolve_path, "problem file (JSON)")->required();
    evolve->add_option("--observable", evolve_observable, "observable name")
        ->required();
    evolve->add_option("--t-max", evolve_tmax, "largest horizon T");
    evolve->add_option("--points", evolve_points, "number of grid points");
    evolve->callback([&]() {
        cmd_evolve(evolve_path, evolve_observable, evolve_tmax, evolve_points);
    });

    int dos_n = 1;
    int dos_bins = 32;
    std::uint64_t dos_samples = 100000;
    std::uint64_t dos_seed = 0;
    auto* dos = app.add_subcommand(
        "dos", "Monte Carlo density-of-states histogram (CSV)");
    dos->add_option("--n", dos_n, "torus dimension (1..6)")->required();
    dos->add_option("--bins", dos_bins, "bins per axis");
    dos->add_option("--samples", dos_samples, "number of sampled states");
    dos->add_option("--seed", dos_seed, "RNG seed");
    dos->callback([&]() { cmd_dos(dos_n, dos_bins, dos_samples, dos_seed); });

    double tl_e0 = 0.0;
    double tl_e1 = 1.0;
    double tl_energy = 0.0;
    double tl_beta = 0.0;
    auto* twolevel = app.add_subcommand(
        "twolevel", "closed-form two-level thermodynamics (CSV)");
    twolevel->add_option("--e0", tl_e0, "ground energy")->required();
    twolevel->add_option("--e1", tl_e1, "excited energy")->required();
    auto* opt_energy =
        twolevel->add_option("--energy", tl_energy, "mean energy E");
    auto* opt_beta =
        twolevel->add_option("--beta", tl_beta, "inverse temperature");
    opt_energy->excludes(opt_beta);
    opt_beta->excludes(opt_energy);
    twolevel->callback([&]() {
        if (!*opt_energy && !*opt_beta) {
            throw CLI::RequiredError("--energy or --beta");
        }
        cmd_twolevel(tl_e0, tl_e1, *opt_energy ? &tl_energy : nullptr,
                     *opt_beta ? &tl_beta : nullptr);
    });

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ergo::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ergo::InfeasibleValues& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ergo::BoundaryState& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ergo::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
