#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "resodyn/distributions.hpp"
#include "resodyn/rng.hpp"
#include "resodyn/types.hpp"

namespace resodyn {

/// Closed-system spectrum: GOE(N) or an equidistant picket fence.
/// Energies are measured in units where the mean spacing at the band
/// centre equals `spacing`.
struct SpectrumModel {
    SpectrumKind kind = SpectrumKind::picket_fence;
    std::size_t levels = 250;
    double spacing = 1.0;
};

enum class SamplingRoute { representation, direct_matrix };

std::string_view to_string(SamplingRoute route) noexcept;
/// Accepts "representation" and "direct" / "direct-matrix".
SamplingRoute parse_sampling_route(std::string_view text);

struct EnsembleConfig {
    SpectrumModel model;
    std::size_t channels = 1;
    std::size_t realizations = 2000;
    std::size_t central_window = 25;
    std::uint64_t seed = 0;
    SamplingRoute route = SamplingRoute::direct_matrix;
    /// Mean partial width in units of the spacing (weak coupling).
    double mean_partial_width = 1e-3;
    /// Worker threads, 0 = hardware concurrency. Does not affect results.
    unsigned threads = 0;

    /// Throws InvalidArgument on inconsistent sizes.
    void validate() const;
};

struct VelocitySampleSet {
    /// Rescaled width velocities, realization-major, window order inside.
    std::vector<double> values;
    /// kappa_n = Gamma_n / Gamma_bar of the level that produced each value.
    std::vector<double> kappas;
    /// Realization index and window slot of each value.
    std::vector<std::size_t> realization;
    std::vector<std::size_t> slot;
    EnsembleConfig config;
    std::size_t skipped_levels = 0;
    /// Estimated relative variance deficit from truncating the level sum.
    double truncation_deficit = 0.0;
    std::vector<std::string> warnings;
};

/**
 * GOE matrix with off-diagonal variance sigma^2 = N spacing^2 / pi^2 and
 * diagonal variance 2 sigma^2, which puts the semicircle's central mean
 * spacing at `spacing`.
 */
RealMatrix sample_goe(std::size_t n, Philox4x32& rng, double spacing = 1.0);

/// E_k = (k - (N+1)/2) spacing, k = 1..N: one level at 0 for odd N, none for even N.
std::vector<double> picket_fence_spectrum(std::size_t n, double spacing = 1.0);

/// I.i.d. normal decay amplitudes with variance mean_partial_width.
RealMatrix sample_couplings(std::size_t n, std::size_t channels, double mean_partial_width, Philox4x32& rng);

/// Indices of the `window` levels closest to E = 0 (ties to the lower
/// index), returned in ascending order.
std::vector<std::size_t> central_levels(const std::vector<double>& levels, std::size_t window);

/**
 * One representation-route sample: (sqrt(kappa)/pi) spacing sum_{m != n} z_m v_m / (E_n - E_m).
 * `z` and `v` are indexed like `levels`; entry n is ignored. Returns NaN if
 * some E_m lies within 1e-8 spacings of E_n.
 */
double representation_velocity(double kappa, std::span<const double> levels, std::size_t n,
                               std::span<const double> z, std::span<const double> v, double spacing = 1.0);

/**
 * One direct-route sample for level n. `basis` holds the eigenvectors of H
 * as columns (nullptr when H is already diagonal). Returns NaN for
 * near-degenerate levels.
 */
double direct_velocity(std::span<const double> levels, const RealMatrix* basis, const RealMatrix& a,
                       const RealMatrix& v, std::size_t n, double spacing, double mean_partial_width);

/**
 * Rescaled velocities y = (sqrt(kappa)/pi) spacing sum_{m != n} z_m v_m / (E_n - E_m)
 * with kappa Porter-Thomas distributed and z, v standard normal, for every
 * window level of every realization. The level sum runs over the whole
 * spectrum.
 */
VelocitySampleSet sample_velocities_representation(const EnsembleConfig& config);

/**
 * Velocities from explicit matrices: H (picket-fence diagonal or GOE), A per
 * sample_couplings, V from the GOE, dGamma_n/dalpha from the weak-coupling
 * formula, then y_n = dGamma_n spacing sqrt(N(N+1)) / (2 pi Gamma_bar sqrt(Tr V^2)).
 */
VelocitySampleSet sample_velocities_direct(const EnsembleConfig& config);

VelocitySampleSet sample_velocities(const EnsembleConfig& config);

/// Sum over the neglected picket-fence tail, 2 sum_{k>K} k^-2 relative to pi^2/3.
double picket_fence_truncation_deficit(std::size_t levels_below, std::size_t levels_above);

struct SampleMoments {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

/// Moments with pairwise summation (order-independent up to rounding).
SampleMoments sample_moments(const std::vector<double>& values);

/// Pairwise sum; deterministic for a given ordering.
double pairwise_sum(const double* data, std::size_t n);

}  // namespace resodyn
