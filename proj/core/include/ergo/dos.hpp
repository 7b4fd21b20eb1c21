#pragma once

#include "ergo/dynamics.hpp"
#include "ergo/spectral.hpp"

#include <cstdint>
#include <vector>

namespace ergo {

/// Counter-based random stream: the state is derived from (seed, index) by
/// avalanche mixing, so sample index i always sees the same variates no
/// matter how the index range is chunked across threads.
class SampleStream {
  public:
    SampleStream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next_u64();
    /// Uniform on [0, 1), 53-bit resolution.
    double uniform();
    /// Standard normal via Box-Muller (pairs are cached).
    double normal();

  private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Uniform pure state on the (n+1)-dimensional manifold: 2(n+1) standard
/// normals as real/imaginary parts, normalized. Populations come out
/// uniform on the simplex and phases uniform and independent on the torus.
/// Amplitudes are tagged as energy-basis coordinates.
PureState sample_pure_state(int n, SampleStream& stream);

/// Histogram estimate of the density of states over the simplex
/// coordinates (p_0 .. p_{n-1}), normalized so the total mass equals the
/// pure-state manifold volume pi^n / n!.
class DoSHistogram {
  public:
    DoSHistogram(int n, int bins_per_axis, std::uint64_t samples,
                 std::uint64_t seed, std::vector<std::uint64_t> counts);

    int n() const { return n_; }
    int bins_per_axis() const { return bins_; }
    std::uint64_t samples() const { return samples_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    std::size_t bin_count() const { return counts_.size(); }

    /// Scale factor from a raw count to a density estimate.
    double normalization() const { return normalization_; }
    double estimate(std::size_t flat) const {
        return static_cast<double>(counts_[flat]) * normalization_;
    }
    /// Binomial standard error of the estimate.
    double std_error(std::size_t flat) const;

    /// Center coordinates of a bin; flat index is row-major with p_0
    /// slowest.
    std::vector<double> bin_center(std::size_t flat) const;
    /// True if the bin lies entirely inside the open hyper-triangle
    /// {0 < p_i, sum p_i < 1}.
    bool bin_interior(std::size_t flat) const;

    /// sum over bins of estimate * bin volume; equals target_mass by
    /// construction of the normalization.
    double total_mass() const;
    /// Volume of the pure-state manifold, pi^n / n!.
    static double target_mass(int n);

  private:
    int n_;
    int bins_;
    std::uint64_t samples_;
    std::uint64_t seed_;
    std::vector<std::uint64_t> counts_;
    double normalization_;
};

/// Monte Carlo density-of-states estimate from N sampled states. Sampling
/// is split into `chunks` index ranges (run on threads when chunks > 1) and
/// merged by exact count addition; the result is bit-identical for any
/// chunk count.
DoSHistogram estimate_dos(int n, int bins_per_axis, std::uint64_t N,
                          std::uint64_t seed, int chunks = 1);

/// Closed-form density of states: pi^n inside the open hyper-triangular
/// region {0 < p_i < 1, 0 < sum p_i < 1}, zero outside.
double analytic_dos(int n, const RVector& p);

/// One-dimensional marginal histogram of the density of states over the
/// mean energy E = sum p_i E_i. The window pads the spectral range by 5%
/// on each side, so bins beyond the extremal eigenvalues stay exactly zero
/// and the support boundary is visible.
class EnergyHistogram {
  public:
    EnergyHistogram(double e_min, double e_max, std::uint64_t samples,
                    std::vector<std::uint64_t> counts, double manifold_volume);

    double e_min() const { return e_min_; }
    double e_max() const { return e_max_; }
    std::size_t bin_count() const { return counts_.size(); }
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    double bin_width() const;
    double bin_center(std::size_t b) const;
    double estimate(std::size_t b) const;
    double std_error(std::size_t b) const;

  private:
    double e_min_;
    double e_max_;
    std::uint64_t samples_;
    std::vector<std::uint64_t> counts_;
    double normalization_;
};

/// Monte Carlo estimate of the energy marginal for a nondegenerate
/// spectrum with at least two levels.
EnergyHistogram energy_dos(const SpectralDecomposition& spec, int e_bins,
                           std::uint64_t N, std::uint64_t seed);

}  // namespace ergo
