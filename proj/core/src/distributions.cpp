#include "resodyn/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "resodyn/errors.hpp"

namespace resodyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_channels(int channels) {
    if (channels < 1) {
        std::ostringstream os;
        os << "channel count must be >= 1, got " << channels;
        throw InvalidArgument(os.str());
    }
}

// log(2^{M/2} Gamma(M/2))
double log_pt_norm(int channels) {
    const double half = 0.5 * channels;
    return half * std::log(2.0) + std::lgamma(half);
}

// Integrates fn over [0, inf). The range is split at the chi scale sqrt(M)
// so the kernel's bulk sits inside a finite panel.
double integrate_half_line(const std::function<double(double)>& fn, double split, const QuadratureOptions& options) {
    using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
    double err = 0.0;
    const double head = Quad::integrate(fn, 0.0, split, options.max_depth, options.relative_tolerance, &err);
    const double tail = Quad::integrate(fn, split, kInf, options.max_depth, options.relative_tolerance, &err);
    return head + tail;
}

}  // namespace

std::string_view to_string(SpectrumKind kind) noexcept {
    switch (kind) {
        case SpectrumKind::goe:
            return "goe";
        case SpectrumKind::picket_fence:
            return "picket-fence";
    }
    return "unknown";
}

SpectrumKind parse_spectrum_kind(std::string_view text) {
    if (text == "goe" || text == "GOE") return SpectrumKind::goe;
    if (text == "picket-fence" || text == "picket_fence" || text == "pf") return SpectrumKind::picket_fence;
    throw InvalidArgument("unknown spectrum model '" + std::string(text) + "' (expected goe or picket-fence)");
}

double porter_thomas_pdf(double kappa, int channels) {
    check_channels(channels);
    if (!(kappa > 0.0)) throw InvalidArgument("Porter-Thomas density requires kappa > 0");
    const double half = 0.5 * channels;
    return std::exp((half - 1.0) * std::log(kappa) - 0.5 * kappa - log_pt_norm(channels));
}

double porter_thomas_cdf(double kappa, int channels) {
    check_channels(channels);
    if (kappa <= 0.0) return 0.0;
    return boost::math::gamma_p(0.5 * channels, 0.5 * kappa);
}

double phi_goe(double y) {
    const double s = 1.0 + y * y;
    return (4.0 + y * y) / (6.0 * s * s * std::sqrt(s));
}

double phi_goe_cdf(double y) {
    // Upper tail Q(t) = 1/2 - (4t + 3t^3) / (6 s^3), s = sqrt(1 + t^2),
    // rearranged to avoid cancellation for large t.
    const double t = std::abs(y);
    if (std::isinf(t)) return y > 0 ? 1.0 : 0.0;
    const double s = std::sqrt(1.0 + t * t);
    const double q = (3.0 * (s * s + s * t + t * t) / (s + t) - 4.0 * t) / (6.0 * s * s * s);
    return y >= 0.0 ? 1.0 - q : q;
}

double phi_pf(double y) {
    const double a = std::abs(y);
    if (a <= 700.0 / kPi) return kPi / (2.0 * (1.0 + std::cosh(kPi * a)));
    // (pi/4) sech^2(pi y / 2) = pi e^{-pi|y|} / (1 + e^{-pi|y|})^2
    const double e = std::exp(-kPi * a);
    return std::exp(std::log(kPi) - kPi * a - 2.0 * std::log1p(e));
}

double phi_pf_cdf(double y) { return 1.0 / (1.0 + std::exp(-kPi * y)); }

double phi(SpectrumKind kind, double y) { return kind == SpectrumKind::goe ? phi_goe(y) : phi_pf(y); }

double phi_cdf(SpectrumKind kind, double y) { return kind == SpectrumKind::goe ? phi_goe_cdf(y) : phi_pf_cdf(y); }

double velocity_pdf(double y, int channels, SpectrumKind kind, const QuadratureOptions& options) {
    check_channels(channels);
    if (channels == 1 && y == 0.0) {
        throw SingularPointError("velocity density diverges at y = 0 for a single channel");
    }
    const double log_norm = log_pt_norm(channels);
    const double power = channels - 2.0;
    // dk k^{-1/2} P_M(k) with k = t^2 becomes 2 t^{M-2} e^{-t^2/2} / norm dt.
    auto integrand = [&](double t) {
        if (t <= 0.0) {
            if (y != 0.0) return 0.0;
            return channels == 2 ? 2.0 * std::exp(-log_norm) * phi(kind, 0.0) : 0.0;
        }
        const double weight = 2.0 * std::exp(power * std::log(t) - 0.5 * t * t - log_norm);
        return weight * phi(kind, y / t);
    };
    return integrate_half_line(integrand, std::sqrt(static_cast<double>(channels)), options);
}

double porter_thomas_mixture_cdf(double y, int channels, const std::function<double(double)>& base_cdf,
                                 const QuadratureOptions& options) {
    check_channels(channels);
    if (y == 0.0) return base_cdf(0.0);
    const double log_norm = log_pt_norm(channels);
    const double power = channels - 1.0;
    // dk P_M(k) with k = t^2 becomes 2 t^{M-1} e^{-t^2/2} / norm dt.
    // Integrate the deviation from the t -> 0 limit so the tails stay accurate.
    const double limit = y > 0.0 ? 1.0 : 0.0;
    auto integrand = [&](double t) {
        if (t <= 0.0) return 0.0;
        const double weight = 2.0 * std::exp(power * std::log(t) - 0.5 * t * t - log_norm);
        return weight * (base_cdf(y / t) - limit);
    };
    return limit + integrate_half_line(integrand, std::sqrt(static_cast<double>(channels)), options);
}

double velocity_cdf(double y, int channels, SpectrumKind kind, const QuadratureOptions& options) {
    return porter_thomas_mixture_cdf(y, channels, [kind](double x) { return phi_cdf(kind, x); }, options);
}

double large_m_limit_pf(double y, int channels) {
    check_channels(channels);
    const double root = std::sqrt(static_cast<double>(channels));
    return phi_pf(y / root) / root;
}

double invert_cdf(const std::function<double(double)>& cdf, double p, double tolerance) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("quantile level must lie in (0, 1)");
    double lo = -1.0;
    double hi = 1.0;
    while (cdf(lo) > p) lo *= 2.0;
    while (cdf(hi) < p) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > tolerance * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace resodyn
