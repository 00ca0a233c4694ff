#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace resodyn {

/// Spectral statistics of the closed system.
enum class SpectrumKind { goe, picket_fence };

std::string_view to_string(SpectrumKind kind) noexcept;
/// Accepts "goe", "picket-fence", "picket_fence" and "pf".
SpectrumKind parse_spectrum_kind(std::string_view text);

/// Chi-square density with M degrees of freedom for kappa = Gamma/Gamma_bar.
/// Throws InvalidArgument for kappa <= 0 or M < 1.
double porter_thomas_pdf(double kappa, int channels);
double porter_thomas_cdf(double kappa, int channels);

/// (4 + y^2) / (6 (1 + y^2)^{5/2}); heavy |y|^-3 tails.
double phi_goe(double y);
double phi_goe_cdf(double y);

/// pi / (2 (1 + cosh(pi y))), overflow-safe for large |y|.
double phi_pf(double y);
/// Logistic CDF 1 / (1 + exp(-pi y)).
double phi_pf_cdf(double y);

double phi(SpectrumKind kind, double y);
double phi_cdf(SpectrumKind kind, double y);

struct QuadratureOptions {
    double relative_tolerance = 1e-12;
    unsigned max_depth = 20;
};

/**
 * Width-velocity density P_M(y) = int_0^inf dk k^{-1/2} P_M(k) phi(y/sqrt(k)),
 * integrated adaptively in t = sqrt(k). Diverges (integrably) at y = 0 for
 * M = 1: throws SingularPointError there.
 */
double velocity_pdf(double y, int channels, SpectrumKind kind, const QuadratureOptions& options = {});

/// CDF of the same mixture, int_0^inf dk P_M(k) Phi(y/sqrt(k)).
double velocity_cdf(double y, int channels, SpectrumKind kind, const QuadratureOptions& options = {});

/// Porter-Thomas scale mixture of an arbitrary symmetric base CDF; the
/// velocity CDF is this with the phi CDF as base.
double porter_thomas_mixture_cdf(double y, int channels, const std::function<double(double)>& base_cdf,
                                 const QuadratureOptions& options = {});

/// Large-M picket-fence limit (1/sqrt(M)) phi_pf(y / sqrt(M)).
double large_m_limit_pf(double y, int channels);

/// Inverse of a continuous increasing CDF by bracket expansion and bisection.
double invert_cdf(const std::function<double(double)>& cdf, double p, double tolerance = 1e-12);

}  // namespace resodyn
