#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <ergo/dos.hpp>

#include "support/oracles.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace ergo;

namespace {

constexpr double kPi = std::numbers::pi;

RVector rvec(std::initializer_list<double> xs) {
    RVector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index k = 0;
    for (double x : xs) {
        v[k++] = x;
    }
    return v;
}

// Aggregate chi-squared z-score of the observed counts against a flat
// expectation; |z| <= 3 means the scatter is Poisson noise alone.
double flatness_z(const std::vector<double>& observed, double expected) {
    double chi2 = 0.0;
    for (double obs : observed) {
        const double d = obs - expected;
        chi2 += d * d / expected;
    }
    const double k = static_cast<double>(observed.size());
    return (chi2 - k) / std::sqrt(2.0 * k);
}

}  // namespace

TEST_CASE("sample streams are counter-based") {
    SampleStream a(42, 7);
    SampleStream b(42, 7);
    SampleStream c(42, 8);
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.uniform() == b.uniform());
    CHECK(a.normal() == b.normal());
    SampleStream a2(42, 7);
    CHECK(a2.next_u64() != c.next_u64());
}

TEST_CASE("sampled states are normalized") {
    SampleStream stream(1, 0);
    for (int n : {1, 2, 5}) {
        const PureState psi = sample_pure_state(n, stream);
        CHECK(psi.dim() == n + 1);
        CHECK(std::abs(psi.amplitudes().norm() - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(sample_pure_state(0, stream), OutOfRangeDimension);
}

TEST_CASE("two-level populations are uniform on [0, 1]") {
    const std::uint64_t samples = 100000;
    std::vector<double> p0;
    p0.reserve(samples);
    for (std::uint64_t i = 0; i < samples; ++i) {
        SampleStream stream(2024, i);
        const PureState psi = sample_pure_state(1, stream);
        p0.push_back(std::norm(psi.amplitudes()[0]));
    }
    CHECK(testsupport::ks_uniform(std::move(p0)) < 0.01);
}

TEST_CASE("relative phases are uniform on the torus") {
    const std::uint64_t samples = 100000;
    const int n = 3;
    std::vector<std::vector<double>> phases(n + 1);
    for (std::uint64_t i = 0; i < samples; ++i) {
        SampleStream stream(99, i);
        const PureState psi = sample_pure_state(n, stream);
        for (int k = 0; k <= n; ++k) {
            const double arg = std::arg(psi.amplitudes()[k]);
            phases[static_cast<std::size_t>(k)].push_back(
                (arg + kPi) / (2.0 * kPi));
        }
    }
    for (auto& axis : phases) {
        CHECK(testsupport::ks_uniform(std::move(axis)) < 0.01);
    }
}

TEST_CASE("three-level populations are uniform on the triangle") {
    const auto hist = estimate_dos(2, 16, 1000000, 7);

    std::vector<double> interior_counts;
    double expected = 0.0;
    for (std::size_t b = 0; b < hist.bin_count(); ++b) {
        const auto center = hist.bin_center(b);
        if (hist.bin_interior(b)) {
            interior_counts.push_back(static_cast<double>(hist.counts()[b]));
        } else if (center[0] + center[1] - 1.0 / 16.0 > 1.0) {
            // Bins strictly beyond the simplex never receive a sample.
            CHECK(hist.counts()[b] == 0);
        }
    }
    // Uniform density on the triangle: each fully-inside cell holds
    // N * 2 * w^2 samples on average.
    expected = 1000000.0 * 2.0 / 256.0;
    REQUIRE(interior_counts.size() == 120);
    CHECK(std::abs(flatness_z(interior_counts, expected)) <= 3.0);
}

TEST_CASE("density-of-states histograms reproduce the flat profile") {
    SUBCASE("n = 1: every bin near pi") {
        const auto hist = estimate_dos(1, 64, 1000000, 42);
        for (std::size_t b = 0; b < hist.bin_count(); ++b) {
            CHECK(std::abs(hist.estimate(b) - kPi) < 0.03 * kPi);
        }
        CHECK(hist.total_mass() ==
              doctest::Approx(DoSHistogram::target_mass(1)).epsilon(1e-12));
    }
    SUBCASE("n = 2: interior bins near pi^2") {
        const auto hist = estimate_dos(2, 16, 1000000, 42);
        for (std::size_t b = 0; b < hist.bin_count(); ++b) {
            if (hist.bin_interior(b)) {
                CHECK(std::abs(hist.estimate(b) - kPi * kPi) <
                      0.05 * kPi * kPi);
            }
        }
        CHECK(hist.total_mass() ==
              doctest::Approx(DoSHistogram::target_mass(2)).epsilon(1e-12));
    }
    SUBCASE("n = 3: interior bins near pi^3, exterior exactly zero") {
        const auto hist = estimate_dos(3, 8, 1000000, 42);
        const double target = kPi * kPi * kPi;
        for (std::size_t b = 0; b < hist.bin_count(); ++b) {
            const auto center = hist.bin_center(b);
            const double corner_sum =
                center[0] + center[1] + center[2] - 3.0 / 16.0;
            if (hist.bin_interior(b)) {
                CHECK(std::abs(hist.estimate(b) - target) < 0.10 * target);
            } else if (corner_sum > 1.0) {
                CHECK(hist.counts()[b] == 0);
            }
        }
        CHECK(hist.total_mass() ==
              doctest::Approx(DoSHistogram::target_mass(3)).epsilon(1e-12));
    }
}

TEST_CASE("histograms are reproducible and chunk-invariant") {
    const auto a = estimate_dos(2, 8, 20000, 123, 1);
    const auto b = estimate_dos(2, 8, 20000, 123, 1);
    const auto c = estimate_dos(2, 8, 20000, 123, 4);
    CHECK(a.counts() == b.counts());
    CHECK(a.counts() == c.counts());

    const auto other_seed = estimate_dos(2, 8, 20000, 124, 1);
    CHECK(a.counts() != other_seed.counts());
}

TEST_CASE("analytic density of states") {
    CHECK(analytic_dos(2, rvec({0.2, 0.3})) ==
          doctest::Approx(kPi * kPi).epsilon(1e-15));
    CHECK(analytic_dos(2, rvec({0.6, 0.6})) == 0.0);
    CHECK(analytic_dos(1, rvec({0.5})) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(analytic_dos(1, rvec({0.0})) == 0.0);
    CHECK(analytic_dos(1, rvec({1.0})) == 0.0);
    CHECK(analytic_dos(3, rvec({0.2, 0.2, 0.2})) ==
          doctest::Approx(kPi * kPi * kPi).epsilon(1e-15));
    CHECK_THROWS_AS(analytic_dos(2, rvec({0.5})), DimensionMismatch);
}

TEST_CASE("energy marginal for the two-level system is flat") {
    CMatrix h = CMatrix::Zero(2, 2);
    h(1, 1) = 1.0;
    const auto spec = eigendecompose(HermitianOperator(h));
    const auto hist = energy_dos(spec, 66, 1000000, 5);

    for (std::size_t b = 0; b < hist.bin_count(); ++b) {
        const double lo = hist.e_min() + b * hist.bin_width();
        const double hi = lo + hist.bin_width();
        if (lo >= 0.0 && hi <= 1.0) {
            CHECK(std::abs(hist.estimate(b) - kPi) < 0.03 * kPi);
        } else if (hi <= 0.0 || lo >= 1.0) {
            CHECK(hist.counts()[b] == 0);
        }
    }
}

TEST_CASE("energy marginal rejects degenerate spectra") {
    const auto spec = eigendecompose(HermitianOperator(
        (CMatrix(3, 3) << 0, 0, 0, 0, 1, 0, 0, 0, 1).finished()));
    CHECK_THROWS_AS(energy_dos(spec, 16, 1000, 1), DegenerateTrivial);
}

TEST_CASE("three-level energy marginal matches simplex quadrature") {
    CMatrix h = CMatrix::Zero(3, 3);
    h(1, 1) = 1.0;
    h(2, 2) = 2.0;
    const auto spec = eigendecompose(HermitianOperator(h));
    const int bins = 20;
    const auto hist = energy_dos(spec, bins, 1000000, 11);

    // Deterministic midpoint quadrature over the 2-simplex: each surviving
    // cell carries density pi^2 and lands in the bin of its mean energy.
    std::vector<double> mass(static_cast<std::size_t>(bins), 0.0);
    const int grid = 2000;
    const double cell = 1.0 / grid;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const double p0 = (i + 0.5) * cell;
            const double p1 = (j + 0.5) * cell;
            if (p0 + p1 >= 1.0) {
                continue;
            }
            const double e = p0 * 0.0 + p1 * 1.0 + (1.0 - p0 - p1) * 2.0;
            auto idx = static_cast<std::size_t>((e - hist.e_min()) /
                                                hist.bin_width());
            if (idx >= mass.size()) {
                idx = mass.size() - 1;
            }
            mass[idx] += kPi * kPi * cell * cell;
        }
    }
    for (std::size_t b = 0; b < hist.bin_count(); ++b) {
        const double oracle = mass[b] / hist.bin_width();
        const double tolerance = 5.0 * hist.std_error(b) + 0.02 * kPi * kPi;
        CHECK(std::abs(hist.estimate(b) - oracle) < tolerance);
    }
}
