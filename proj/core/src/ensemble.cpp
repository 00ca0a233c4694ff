#include "resodyn/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/trigamma.hpp>

#include "resodyn/errors.hpp"
#include "resodyn/parallel.hpp"
#include "resodyn/perturbation.hpp"

namespace resodyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Levels closer than this (in spacings) are treated as degenerate.
constexpr double kDegenerateSeparation = 1e-8;

}  // namespace

std::string_view to_string(SamplingRoute route) noexcept {
    return route == SamplingRoute::representation ? "representation" : "direct-matrix";
}

SamplingRoute parse_sampling_route(std::string_view text) {
    if (text == "representation") return SamplingRoute::representation;
    if (text == "direct" || text == "direct-matrix" || text == "direct_matrix") return SamplingRoute::direct_matrix;
    throw InvalidArgument("unknown sampling route '" + std::string(text) + "' (expected representation or direct)");
}

void EnsembleConfig::validate() const {
    if (model.levels < 2) throw InvalidArgument("ensemble needs at least 2 levels");
    if (channels < 1) throw InvalidArgument("ensemble needs at least 1 channel");
    if (realizations < 1) throw InvalidArgument("ensemble needs at least 1 realization");
    if (central_window < 1 || central_window > model.levels) {
        std::ostringstream os;
        os << "central window " << central_window << " must lie in [1, " << model.levels << "]";
        throw InvalidArgument(os.str());
    }
    if (!(model.spacing > 0.0)) throw InvalidArgument("mean level spacing must be positive");
    if (!(mean_partial_width > 0.0)) throw InvalidArgument("mean partial width must be positive");
}

RealMatrix sample_goe(std::size_t n, Philox4x32& rng, double spacing) {
    if (n < 2) throw InvalidArgument("GOE sample needs N >= 2");
    const double sigma = std::sqrt(static_cast<double>(n)) * spacing / kPi;
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto size = static_cast<Eigen::Index>(n);
    RealMatrix h(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
        h(i, i) = std::sqrt(2.0) * sigma * normal(rng);
        for (Eigen::Index j = i + 1; j < size; ++j) {
            h(i, j) = sigma * normal(rng);
            h(j, i) = h(i, j);
        }
    }
    return h;
}

std::vector<double> picket_fence_spectrum(std::size_t n, double spacing) {
    if (n < 2) throw InvalidArgument("picket fence needs N >= 2");
    std::vector<double> levels(n);
    const double center = 0.5 * static_cast<double>(n + 1);
    for (std::size_t k = 1; k <= n; ++k) levels[k - 1] = (static_cast<double>(k) - center) * spacing;
    return levels;
}

RealMatrix sample_couplings(std::size_t n, std::size_t channels, double mean_partial_width, Philox4x32& rng) {
    if (!(mean_partial_width > 0.0)) throw InvalidArgument("mean partial width must be positive");
    std::normal_distribution<double> normal(0.0, std::sqrt(mean_partial_width));
    RealMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(channels));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) a(i, c) = normal(rng);
    }
    return a;
}

std::vector<std::size_t> central_levels(const std::vector<double>& levels, std::size_t window) {
    std::vector<std::size_t> idx(levels.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    window = std::min(window, levels.size());
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(levels[a]) < std::abs(levels[b]); });
    idx.resize(window);
    std::sort(idx.begin(), idx.end());
    return idx;
}

double picket_fence_truncation_deficit(std::size_t levels_below, std::size_t levels_above) {
    // sum_{k > K} k^-2 = trigamma(K + 1)
    const double missing = boost::math::trigamma(static_cast<double>(levels_below) + 1.0) +
                           boost::math::trigamma(static_cast<double>(levels_above) + 1.0);
    return missing / (kPi * kPi / 3.0);
}

double representation_velocity(double kappa, std::span<const double> levels, std::size_t n,
                               std::span<const double> z, std::span<const double> v, double spacing) {
    if (n >= levels.size() || z.size() != levels.size() || v.size() != levels.size()) {
        throw InvalidArgument("representation_velocity: size mismatch");
    }
    const double min_gap = kDegenerateSeparation * spacing;
    double sum = 0.0;
    for (std::size_t m = 0; m < levels.size(); ++m) {
        if (m == n) continue;
        const double gap = levels[n] - levels[m];
        if (std::abs(gap) < min_gap) return kNaN;
        sum += z[m] * v[m] / gap;
    }
    return std::sqrt(kappa) / kPi * spacing * sum;
}

double direct_velocity(std::span<const double> levels, const RealMatrix* basis, const RealMatrix& a,
                       const RealMatrix& v, std::size_t n, double spacing, double mean_partial_width) {
    WeakCouplingOptions wc;
    wc.min_separation = kDegenerateSeparation;
    double rate = 0.0;
    try {
        rate = basis == nullptr ? weak_coupling_width_velocity(levels, a, v, n, wc)
                                : weak_coupling_width_velocity(levels, *basis, a, v, n, wc);
    } catch (const SmallDenominatorError&) {
        return kNaN;
    }
    const double n_real = static_cast<double>(levels.size());
    const double scale = spacing * std::sqrt(n_real * (n_real + 1.0)) / (2.0 * kPi * mean_partial_width);
    return rate * scale / v.norm();
}

namespace {

std::vector<double> sorted_goe_levels(std::size_t n, Philox4x32& rng, double spacing) {
    const RealMatrix h = sample_goe(n, rng, spacing);
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("GOE eigenvalue solver did not converge");
    const RealVector& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

VelocitySampleSet finalize(const EnsembleConfig& config, std::vector<double> values, std::vector<double> kappas) {
    VelocitySampleSet out;
    out.config = config;
    out.values.reserve(values.size());
    out.kappas.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::isnan(values[i])) {
            ++out.skipped_levels;
            continue;
        }
        out.values.push_back(values[i]);
        out.kappas.push_back(kappas[i]);
        out.realization.push_back(i / config.central_window);
        out.slot.push_back(i % config.central_window);
    }
    if (out.skipped_levels > 0) {
        std::ostringstream os;
        os << "skipped " << out.skipped_levels << " near-degenerate levels";
        out.warnings.push_back(os.str());
    }

    if (config.model.kind == SpectrumKind::picket_fence) {
        const auto levels = picket_fence_spectrum(config.model.levels, config.model.spacing);
        const auto window = central_levels(levels, config.central_window);
        double deficit = 0.0;
        for (std::size_t n : window) deficit += picket_fence_truncation_deficit(n, config.model.levels - 1 - n);
        out.truncation_deficit = deficit / static_cast<double>(window.size());
        if (out.truncation_deficit > 0.01) {
            std::ostringstream os;
            os << "level sum truncated: estimated variance deficit " << out.truncation_deficit;
            out.warnings.push_back(os.str());
        }
    }
    return out;
}

}  // namespace

VelocitySampleSet sample_velocities_representation(const EnsembleConfig& config) {
    config.validate();
    const std::size_t n_levels = config.model.levels;
    const std::size_t window = config.central_window;
    const double spacing = config.model.spacing;
    std::vector<double> values(config.realizations * window, kNaN);
    std::vector<double> kappas(config.realizations * window, kNaN);

    std::vector<double> fence;
    if (config.model.kind == SpectrumKind::picket_fence) fence = picket_fence_spectrum(n_levels, spacing);

    parallel_for(config.realizations, config.threads, [&](std::size_t r) {
        Philox4x32 rng = substream(config.seed, r);
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::vector<double> levels =
            config.model.kind == SpectrumKind::goe ? sorted_goe_levels(n_levels, rng, spacing) : fence;
        const auto central = central_levels(levels, window);

        std::vector<double> z(n_levels, 0.0);
        std::vector<double> v(n_levels, 0.0);
        for (std::size_t j = 0; j < central.size(); ++j) {
            const std::size_t n = central[j];
            double kappa = 0.0;
            for (std::size_t c = 0; c < config.channels; ++c) {
                const double g = normal(rng);
                kappa += g * g;
            }
            for (std::size_t m = 0; m < n_levels; ++m) {
                if (m == n) continue;
                z[m] = normal(rng);
                v[m] = normal(rng);
            }
            const double y = representation_velocity(kappa, levels, n, z, v, spacing);
            if (std::isnan(y)) continue;
            values[r * window + j] = y;
            kappas[r * window + j] = kappa;
        }
    });
    return finalize(config, std::move(values), std::move(kappas));
}

VelocitySampleSet sample_velocities_direct(const EnsembleConfig& config) {
    config.validate();
    const std::size_t n_levels = config.model.levels;
    const std::size_t window = config.central_window;
    const double spacing = config.model.spacing;
    const double gamma_bar = config.mean_partial_width;
    std::vector<double> values(config.realizations * window, kNaN);
    std::vector<double> kappas(config.realizations * window, kNaN);

    std::vector<double> fence;
    if (config.model.kind == SpectrumKind::picket_fence) fence = picket_fence_spectrum(n_levels, spacing);

    parallel_for(config.realizations, config.threads, [&](std::size_t r) {
        Philox4x32 rng = substream(config.seed, r);
        std::vector<double> levels;
        RealMatrix basis;
        const bool diagonal = config.model.kind == SpectrumKind::picket_fence;
        if (diagonal) {
            levels = fence;
        } else {
            const RealMatrix h = sample_goe(n_levels, rng, spacing);
            Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h);
            if (solver.info() != Eigen::Success) throw NumericalError("GOE eigensolver did not converge");
            levels.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n_levels);
            basis = solver.eigenvectors();
        }
        const RealMatrix a = sample_couplings(n_levels, config.channels, gamma_bar, rng);
        const RealMatrix v = sample_goe(n_levels, rng, 1.0);
        const auto central = central_levels(levels, window);

        for (std::size_t j = 0; j < central.size(); ++j) {
            const std::size_t n = central[j];
            const auto k = static_cast<Eigen::Index>(n);
            const double y = direct_velocity(levels, diagonal ? nullptr : &basis, a, v, n, spacing, gamma_bar);
            if (std::isnan(y)) continue;
            const double width = diagonal ? a.row(k).squaredNorm() : (basis.col(k).transpose() * a).squaredNorm();
            values[r * window + j] = y;
            kappas[r * window + j] = width / gamma_bar;
        }
    });
    return finalize(config, std::move(values), std::move(kappas));
}

VelocitySampleSet sample_velocities(const EnsembleConfig& config) {
    return config.route == SamplingRoute::representation ? sample_velocities_representation(config)
                                                         : sample_velocities_direct(config);
}

double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

SampleMoments sample_moments(const std::vector<double>& values) {
    SampleMoments m;
    m.count = values.size();
    if (values.empty()) return m;
    const double count = static_cast<double>(values.size());
    m.mean = pairwise_sum(values.data(), values.size()) / count;
    std::vector<double> buf(values.size());
    auto central = [&](int power) {
        for (std::size_t i = 0; i < values.size(); ++i) buf[i] = std::pow(values[i] - m.mean, power);
        return pairwise_sum(buf.data(), buf.size()) / count;
    };
    const double m2 = central(2);
    const double m3 = central(3);
    const double m4 = central(4);
    m.variance = values.size() > 1 ? m2 * count / (count - 1.0) : 0.0;
    if (m2 > 0.0) {
        m.skewness = m3 / std::pow(m2, 1.5);
        m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return m;
}

}  // namespace resodyn
