#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "resodyn/distributions.hpp"

namespace resodyn {

/// A continuous reference distribution for goodness-of-fit tests.
struct ModelCurve {
    std::string name;
    std::function<double(double)> pdf;
    std::function<double(double)> cdf;
};

/// Width-velocity distribution for a spectrum model and channel count.
ModelCurve velocity_curve(SpectrumKind kind, int channels);

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t observed = 0;
    double expected = 0.0;
    /// observed / (n * width); NaN for the unbounded outer bins.
    double density = 0.0;
    /// Model probability mass / width; NaN for the unbounded outer bins.
    double model_density = 0.0;
};

struct GoodnessOfFit {
    double chi_square = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value = 0.0;
    /// max |density - model_density| over the bounded bins.
    double sup_norm = 0.0;
    std::vector<HistogramBin> bins;
    std::vector<std::string> notes;
};

struct HistogramOptions {
    /// 0 selects max(10, min(100, n / 50)) bins.
    std::size_t bins = 0;
    std::size_t min_expected = 10;
};

/**
 * Pearson chi-square against `model` with equal-probability bins whose
 * edges are model quantiles. Coarsens the binning (and records a note) when
 * fewer than `min_expected` counts per bin would result. Needs >= 1000
 * samples; throws InvalidArgument otherwise.
 */
GoodnessOfFit compare_histogram(const std::vector<double>& samples, const ModelCurve& model,
                                const HistogramOptions& options = {});

struct KolmogorovSmirnov {
    double statistic = 0.0;
    double p_value = 0.0;
};

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_survival(double lambda);

KolmogorovSmirnov ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);
KolmogorovSmirnov ks_two_sample(std::vector<double> first, std::vector<double> second);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_survival(double statistic, double dof);

struct EqualWidthHistogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::size_t> counts;
    std::size_t total = 0;
    std::size_t below = 0;
    std::size_t above = 0;

    double width() const { return (hi - lo) / static_cast<double>(counts.size()); }
    double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width(); }
    /// Normalized by the total sample count, including out-of-range samples.
    double density(std::size_t i) const {
        return static_cast<double>(counts[i]) / (static_cast<double>(total) * width());
    }
};

EqualWidthHistogram equal_width_histogram(const std::vector<double>& samples, double lo, double hi,
                                          std::size_t bins);

}  // namespace resodyn
