#include "ergo/dos.hpp"

#include <cmath>
#include <numbers>
#include <thread>

namespace ergo {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

double pow_int(double base, int e) {
    double acc = 1.0;
    for (int i = 0; i < e; ++i) {
        acc *= base;
    }
    return acc;
}

}  // namespace

SampleStream::SampleStream(std::uint64_t seed, std::uint64_t index) {
    state_ = mix64(seed + kGolden * (index + 1));
    state_ = mix64(state_ ^ 0xD1B54A32D192ED03ull);
}

std::uint64_t SampleStream::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double SampleStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SampleStream::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    // u1 on (0, 1] keeps the log finite.
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(angle);
    has_cached_ = true;
    return r * std::cos(angle);
}

PureState sample_pure_state(int n, SampleStream& stream) {
    if (n < 1) {
        throw OutOfRangeDimension("torus dimension must be at least 1");
    }
    CVector v(n + 1);
    double norm2 = 0.0;
    do {
        for (int i = 0; i <= n; ++i) {
            const double re = stream.normal();
            const double im = stream.normal();
            v[i] = Complex(re, im);
        }
        norm2 = v.squaredNorm();
    } while (norm2 == 0.0);
    return PureState(v / std::sqrt(norm2), StateBasis::Energy);
}

DoSHistogram::DoSHistogram(int n, int bins_per_axis, std::uint64_t samples,
                           std::uint64_t seed,
                           std::vector<std::uint64_t> counts)
    : n_(n),
      bins_(bins_per_axis),
      samples_(samples),
      seed_(seed),
      counts_(std::move(counts)) {
    const double w = 1.0 / bins_;
    normalization_ = target_mass(n_) /
                     (static_cast<double>(samples_) * pow_int(w, n_));
}

double DoSHistogram::std_error(std::size_t flat) const {
    const double c = static_cast<double>(counts_[flat]);
    const double nn = static_cast<double>(samples_);
    return normalization_ * std::sqrt(c * (1.0 - c / nn));
}

std::vector<double> DoSHistogram::bin_center(std::size_t flat) const {
    std::vector<double> center(static_cast<std::size_t>(n_));
    const double w = 1.0 / bins_;
    for (int axis = n_ - 1; axis >= 0; --axis) {
        const auto idx = flat % static_cast<std::size_t>(bins_);
        flat /= static_cast<std::size_t>(bins_);
        center[static_cast<std::size_t>(axis)] =
            (static_cast<double>(idx) + 0.5) * w;
    }
    return center;
}

bool DoSHistogram::bin_interior(std::size_t flat) const {
    const auto center = bin_center(flat);
    const double w = 1.0 / bins_;
    double upper_corner = 0.0;
    for (double c : center) {
        upper_corner += c + 0.5 * w;
    }
    // Interior means the whole closed bin sits inside the closed simplex;
    // its interior then lies in the open region where the density is pi^n.
    return upper_corner <= 1.0 + 1e-12;
}

double DoSHistogram::total_mass() const {
    const double w = 1.0 / bins_;
    double mass = 0.0;
    for (std::uint64_t c : counts_) {
        mass += static_cast<double>(c) * normalization_ * pow_int(w, n_);
    }
    return mass;
}

double DoSHistogram::target_mass(int n) {
    double mass = 1.0;
    for (int i = 1; i <= n; ++i) {
        mass *= std::numbers::pi / i;
    }
    return mass;
}

namespace {

void accumulate_counts(int n, int bins, std::uint64_t seed,
                       std::uint64_t begin, std::uint64_t end,
                       std::vector<std::uint64_t>& counts) {
    for (std::uint64_t i = begin; i < end; ++i) {
        SampleStream stream(seed, i);
        const PureState psi = sample_pure_state(n, stream);
        std::size_t flat = 0;
        for (int axis = 0; axis < n; ++axis) {
            const double p = std::norm(psi.amplitudes()[axis]);
            auto idx = static_cast<std::size_t>(p * bins);
            if (idx >= static_cast<std::size_t>(bins)) {
                idx = static_cast<std::size_t>(bins) - 1;
            }
            flat = flat * static_cast<std::size_t>(bins) + idx;
        }
        ++counts[flat];
    }
}

}  // namespace

DoSHistogram estimate_dos(int n, int bins_per_axis, std::uint64_t N,
                          std::uint64_t seed, int chunks) {
    if (n < 1) {
        throw OutOfRangeDimension("torus dimension must be at least 1");
    }
    if (bins_per_axis < 2) {
        throw OutOfRange("need at least 2 bins per axis");
    }
    if (chunks < 1) {
        chunks = 1;
    }
    std::size_t total_bins = 1;
    for (int axis = 0; axis < n; ++axis) {
        total_bins *= static_cast<std::size_t>(bins_per_axis);
    }

    if (chunks == 1 || N < static_cast<std::uint64_t>(chunks)) {
        std::vector<std::uint64_t> counts(total_bins, 0);
        accumulate_counts(n, bins_per_axis, seed, 0, N, counts);
        return DoSHistogram(n, bins_per_axis, N, seed, std::move(counts));
    }

    // Disjoint index ranges per chunk; the per-index streams make the merge
    // independent of the split.
    std::vector<std::vector<std::uint64_t>> partial(
        static_cast<std::size_t>(chunks),
        std::vector<std::uint64_t>(total_bins, 0));
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(chunks));
    for (int c = 0; c < chunks; ++c) {
        const std::uint64_t begin = N * static_cast<std::uint64_t>(c) /
                                    static_cast<std::uint64_t>(chunks);
        const std::uint64_t end = N * static_cast<std::uint64_t>(c + 1) /
                                  static_cast<std::uint64_t>(chunks);
        workers.emplace_back([=, &partial]() {
            accumulate_counts(n, bins_per_axis, seed, begin, end,
                              partial[static_cast<std::size_t>(c)]);
        });
    }
    for (auto& w : workers) {
        w.join();
    }
    std::vector<std::uint64_t> counts(total_bins, 0);
    for (const auto& part : partial) {
        for (std::size_t b = 0; b < total_bins; ++b) {
            counts[b] += part[b];
        }
    }
    return DoSHistogram(n, bins_per_axis, N, seed, std::move(counts));
}

double analytic_dos(int n, const RVector& p) {
    if (p.size() != n) {
        throw DimensionMismatch("coordinate vector must have length n");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0 || p[i] >= 1.0) {
            return 0.0;
        }
        sum += p[i];
    }
    if (sum <= 0.0 || sum >= 1.0) {
        return 0.0;
    }
    return pow_int(std::numbers::pi, n);
}

EnergyHistogram::EnergyHistogram(double e_min, double e_max,
                                 std::uint64_t samples,
                                 std::vector<std::uint64_t> counts,
                                 double manifold_volume)
    : e_min_(e_min),
      e_max_(e_max),
      samples_(samples),
      counts_(std::move(counts)) {
    normalization_ =
        manifold_volume / (static_cast<double>(samples_) * bin_width());
}

double EnergyHistogram::bin_width() const {
    return (e_max_ - e_min_) / static_cast<double>(counts_.size());
}

double EnergyHistogram::bin_center(std::size_t b) const {
    return e_min_ + (static_cast<double>(b) + 0.5) * bin_width();
}

double EnergyHistogram::estimate(std::size_t b) const {
    return static_cast<double>(counts_[b]) * normalization_;
}

double EnergyHistogram::std_error(std::size_t b) const {
    const double c = static_cast<double>(counts_[b]);
    const double nn = static_cast<double>(samples_);
    return normalization_ * std::sqrt(c * (1.0 - c / nn));
}

EnergyHistogram energy_dos(const SpectralDecomposition& spec, int e_bins,
                           std::uint64_t N, std::uint64_t seed) {
    if (spec.num_levels() != spec.dim()) {
        throw DegenerateTrivial(
            "energy marginal requires a nondegenerate spectrum");
    }
    if (spec.num_levels() < 2) {
        throw DegenerateTrivial("need at least two levels");
    }
    if (e_bins < 2) {
        throw OutOfRange("need at least 2 energy bins");
    }
    const int n = static_cast<int>(spec.dim()) - 1;
    const double e_min = spec.level_energies().minCoeff();
    const double e_max = spec.level_energies().maxCoeff();
    // Pad the window so the support boundary shows up as exactly-zero bins.
    const double pad = 0.05 * (e_max - e_min);
    const double lo = e_min - pad;
    const double hi = e_max + pad;
    const double width = (hi - lo) / e_bins;

    std::vector<std::uint64_t> counts(static_cast<std::size_t>(e_bins), 0);
    for (std::uint64_t i = 0; i < N; ++i) {
        SampleStream stream(seed, i);
        const PureState psi = sample_pure_state(n, stream);
        double e = 0.0;
        for (Eigen::Index k = 0; k < psi.dim(); ++k) {
            e += std::norm(psi.amplitudes()[k]) * spec.level_energies()[k];
        }
        auto idx = static_cast<std::size_t>((e - lo) / width);
        if (idx >= counts.size()) {
            idx = counts.size() - 1;
        }
        ++counts[idx];
    }
    return EnergyHistogram(lo, hi, N, std::move(counts),
                           DoSHistogram::target_mass(n));
}

}  // namespace ergo
