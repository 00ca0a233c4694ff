#include "resodyn/goodness_of_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "resodyn/errors.hpp"

namespace resodyn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

ModelCurve velocity_curve(SpectrumKind kind, int channels) {
    ModelCurve curve;
    std::ostringstream os;
    os << "velocity density (" << to_string(kind) << ", M=" << channels << ")";
    curve.name = os.str();
    curve.pdf = [kind, channels](double y) { return velocity_pdf(y, channels, kind); };
    curve.cdf = [kind, channels](double y) { return velocity_cdf(y, channels, kind); };
    return curve;
}

double chi_square_survival(double statistic, double dof) {
    if (!(dof > 0.0)) throw InvalidArgument("chi-square survival needs positive degrees of freedom");
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

GoodnessOfFit compare_histogram(const std::vector<double>& samples, const ModelCurve& model,
                                const HistogramOptions& options) {
    const std::size_t n = samples.size();
    if (n < 1000) {
        std::ostringstream os;
        os << "compare_histogram needs at least 1000 samples, got " << n;
        throw InvalidArgument(os.str());
    }
    GoodnessOfFit fit;
    std::size_t k = options.bins;
    if (k == 0) k = std::max<std::size_t>(10, std::min<std::size_t>(100, n / 50));
    if (n / k < options.min_expected) {
        const std::size_t coarse = std::max<std::size_t>(2, n / options.min_expected);
        std::ostringstream os;
        os << "coarsened from " << k << " to " << coarse << " bins to keep >= " << options.min_expected
           << " expected counts per bin";
        fit.notes.push_back(os.str());
        k = coarse;
    }

    std::vector<double> edges(k + 1);
    edges.front() = -kInf;
    edges.back() = kInf;
    for (std::size_t i = 1; i < k; ++i) {
        edges[i] = invert_cdf(model.cdf, static_cast<double>(i) / static_cast<double>(k), 1e-10);
    }

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double total = static_cast<double>(n);
    double prev_cdf = 0.0;
    auto lower = sorted.begin();
    for (std::size_t i = 0; i < k; ++i) {
        HistogramBin bin;
        bin.lo = edges[i];
        bin.hi = edges[i + 1];
        const auto upper = i + 1 == k ? sorted.end() : std::upper_bound(lower, sorted.end(), bin.hi);
        bin.observed = static_cast<std::size_t>(upper - lower);
        lower = upper;
        const double cdf_hi = i + 1 == k ? 1.0 : model.cdf(bin.hi);
        const double mass = cdf_hi - prev_cdf;
        prev_cdf = cdf_hi;
        bin.expected = total * mass;
        if (std::isfinite(bin.lo) && std::isfinite(bin.hi)) {
            const double width = bin.hi - bin.lo;
            bin.density = static_cast<double>(bin.observed) / (total * width);
            bin.model_density = mass / width;
            fit.sup_norm = std::max(fit.sup_norm, std::abs(bin.density - bin.model_density));
        } else {
            bin.density = kNaN;
            bin.model_density = kNaN;
        }
        const double diff = static_cast<double>(bin.observed) - bin.expected;
        fit.chi_square += diff * diff / bin.expected;
        fit.bins.push_back(bin);
    }
    fit.degrees_of_freedom = k - 1;
    fit.p_value = chi_square_survival(fit.chi_square, static_cast<double>(fit.degrees_of_freedom));
    return fit;
}

double kolmogorov_survival(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16 * std::abs(sum)) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p_value(double statistic, double effective_n) {
    const double root = std::sqrt(effective_n);
    return kolmogorov_survival((root + 0.12 + 0.11 / root) * statistic);
}

}  // namespace

KolmogorovSmirnov ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw InvalidArgument("KS test needs samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return {d, ks_p_value(d, n)};
}

KolmogorovSmirnov ks_two_sample(std::vector<double> first, std::vector<double> second) {
    if (first.empty() || second.empty()) throw InvalidArgument("two-sample KS test needs samples in both sets");
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    const double n1 = static_cast<double>(first.size());
    const double n2 = static_cast<double>(second.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < first.size() && j < second.size()) {
        const double x = std::min(first[i], second[j]);
        while (i < first.size() && first[i] <= x) ++i;
        while (j < second.size() && second[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
    }
    return {d, ks_p_value(d, n1 * n2 / (n1 + n2))};
}

EqualWidthHistogram equal_width_histogram(const std::vector<double>& samples, double lo, double hi,
                                          std::size_t bins) {
    if (bins == 0 || !(hi > lo)) throw InvalidArgument("histogram needs bins > 0 and lo < hi");
    EqualWidthHistogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(bins, 0);
    h.total = samples.size();
    const double width = h.width();
    for (double x : samples) {
        if (x < lo) {
            ++h.below;
        } else if (x >= hi) {
            ++h.above;
        } else {
            const auto b = std::min(bins - 1, static_cast<std::size_t>((x - lo) / width));
            ++h.counts[b];
        }
    }
    return h;
}

}  // namespace resodyn
