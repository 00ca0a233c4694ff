#include <doctest.h>

#include <cmath>
#include <numbers>

#include "resodyn/distributions.hpp"
#include "resodyn/errors.hpp"
#include "test_support.hpp"

using namespace resodyn;
using resodyn::test::gauss_legendre;
using resodyn::test::half_line;

namespace {

constexpr double kPi = std::numbers::pi;

struct Reference {
    int channels;
    double y;
    double pdf;
    double cdf;
};

// 50-digit tanh-sinh quadrature of the kappa-mixture (tests/oracles/distribution_oracle.py).
constexpr Reference kPicketFence[] = {
    {1, 0.01, 2.5082863529805932, 0.53134702168351873},
    {1, 0.5, 0.26490726620369891, 0.88552887592461303},
    {1, 1.0, 0.078228187025517194, 0.96041924306892626},
    {1, 3.0, 0.0020404083690766244, 0.99861075320092807},
    {1, 10.0, 3.7330755688625213e-7, 0.99999962489784091},
    {2, 0.01, 0.96355550877816832, 0.50973913083687695},
    {2, 0.5, 0.35314224298948478, 0.80574966677885259},
    {2, 1.0, 0.13687337795519991, 0.91917696495920251},
    {2, 3.0, 0.0053677732940856904, 0.99607676525981906},
    {2, 10.0, 1.4766991864553707e-6, 0.99999846804594227},
    {5, 0.01, 0.41771987648271826, 0.50417754206855905},
    {5, 0.5, 0.32957050664498868, 0.69229186655713139},
    {5, 1.0, 0.20319646588075224, 0.82441502466194259},
    {5, 3.0, 0.019366044488499419, 0.98288038015787245},
    {5, 10.0, 1.4894160991119223e-5, 0.99998309416217494},
    {10, 0.01, 0.26914888595558192, 0.50269155210674142},
    {10, 0.5, 0.2472018485032021, 0.63080720384565231},
    {10, 1.0, 0.19674148242421751, 0.74241333981379937},
    {10, 3.0, 0.041778489280444495, 0.95244606026783331},
    {10, 10.0, 0.00011006872587664251, 0.99985749908740863},
};

constexpr Reference kGoe[] = {
    {1, 0.01, 2.1845172242777301, 0.52716253165915634},
    {1, 0.5, 0.26612564157197873, 0.85191348488291899},
    {1, 1.0, 0.09314245211738935, 0.93227816494949501},
    {1, 3.0, 0.0067181316170687815, 0.98996280676981062},
    {1, 10.0, 0.00017292829996759662, 0.99915004521925655},
    {2, 0.01, 0.81906254349329632, 0.50827271703773877},
    {2, 0.5, 0.32814473385618113, 0.76871241166068271},
    {2, 1.0, 0.14469241817093028, 0.87973295201566539},
    {2, 3.0, 0.013227368182547961, 0.97983694161567142},
    {2, 10.0, 0.00034943890308110261, 0.99829005510019971},
    {5, 0.01, 0.35457549570579876, 0.50354602068462051},
    {5, 0.5, 0.28629638768236235, 0.6644626623464461},
    {5, 1.0, 0.18729092665833239, 0.78211008281497788},
    {5, 3.0, 0.03005344900370227, 0.95047241919564773},
    {5, 10.0, 0.00089654965865837626, 0.99565700775969657},
    {10, 0.01, 0.22846137955539075, 0.5022846627511792},
    {10, 0.5, 0.21148632473992845, 0.61131615718642199},
    {10, 1.0, 0.17246661900195817, 0.70778661979636998},
    {10, 3.0, 0.048481032038899504, 0.90806577976335128},
    {10, 10.0, 0.0018473244071079375, 0.99112918139139031},
};

// int_0^inf chi-square moments through kappa = t^2, so M = 1 stays smooth.
double pt_moment(int channels, int power) {
    return half_line([&](double t) { return 2.0 * t * std::pow(t * t, power) * porter_thomas_pdf(t * t, channels); },
                     400);
}

}  // namespace

TEST_CASE("Porter-Thomas density") {
    for (int m : {1, 2, 5, 10}) {
        CAPTURE(m);
        CHECK(pt_moment(m, 0) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(pt_moment(m, 1) == doctest::Approx(m).epsilon(1e-10));
        const double second = pt_moment(m, 2);
        CHECK(second - m * m == doctest::Approx(2.0 * m).epsilon(1e-9));
    }
    for (double k : {0.1, 1.0, 3.7}) {
        CHECK(porter_thomas_pdf(k, 2) == doctest::Approx(0.5 * std::exp(-0.5 * k)).epsilon(1e-14));
        CHECK(porter_thomas_cdf(k, 2) == doctest::Approx(1.0 - std::exp(-0.5 * k)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(porter_thomas_pdf(0.0, 1), InvalidArgument);
    CHECK_THROWS_AS(porter_thomas_pdf(-1.0, 2), InvalidArgument);
    CHECK_THROWS_AS(porter_thomas_pdf(1.0, 0), InvalidArgument);
    CHECK(porter_thomas_cdf(0.0, 3) == 0.0);
}

TEST_CASE("base velocity densities") {
    CHECK(phi_goe(0.0) == 2.0 / 3.0);
    CHECK(phi_pf(0.0) == kPi / 4.0);
    for (double y : {0.3, 1.0, 4.0}) {
        CHECK(phi_goe(y) == phi_goe(-y));
        CHECK(phi_pf(y) == phi_pf(-y));
    }
    const double goe_mass = 2.0 * half_line(phi_goe, 400);
    const double pf_mass = 2.0 * half_line(phi_pf, 400);
    CHECK(goe_mass == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(pf_mass == doctest::Approx(1.0).epsilon(1e-10));
    const double pf_var = 2.0 * half_line([](double y) { return y * y * phi_pf(y); }, 400);
    CHECK(pf_var == doctest::Approx(1.0 / 3.0).epsilon(1e-10));

    // Heavy GOE tail: phi_goe ~ 1 / (6 |y|^3).
    CHECK(phi_goe(1e4) * 6e12 == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("picket-fence density is the Fourier transform of its characteristic function") {
    // Characteristic function k / sinh(k).
    auto g = [](double k) { return k == 0.0 ? 1.0 : k / std::sinh(k); };
    for (double y : {0.0, 0.4, 1.0, 2.5, 5.0}) {
        const double ft = gauss_legendre([&](double k) { return std::cos(k * y) * g(k); }, 0.0, 50.0, 400) / kPi;
        CHECK(std::abs(ft - phi_pf(y)) < 1e-8);
    }
}

TEST_CASE("picket-fence density stays finite far out") {
    const double edge = 700.0 / kPi;
    CHECK(phi_pf(edge * (1 - 1e-12)) == doctest::Approx(phi_pf(edge * (1 + 1e-12))).epsilon(1e-8));
    CHECK(std::isfinite(phi_pf(1e4)));
    CHECK(phi_pf(1e4) >= 0.0);
    CHECK(phi_pf(200.0) > 0.0);
    CHECK(phi_pf(300.0) == 0.0);  // below the smallest subnormal
}

TEST_CASE("base CDFs") {
    for (double y : {-3.0, -0.5, 0.0, 0.7, 2.0}) {
        const double h = 1e-5;
        CHECK((phi_goe_cdf(y + h) - phi_goe_cdf(y - h)) / (2 * h) == doctest::Approx(phi_goe(y)).epsilon(1e-8));
        CHECK((phi_pf_cdf(y + h) - phi_pf_cdf(y - h)) / (2 * h) == doctest::Approx(phi_pf(y)).epsilon(1e-8));
        CHECK(phi_goe_cdf(y) + phi_goe_cdf(-y) == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK(phi_goe_cdf(0.0) == 0.5);
    // Upper tail ~ 1 / (12 y^2), resolved without cancellation.
    CHECK(phi_goe_cdf(-1e6) * 12e12 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(phi_goe_cdf(-INFINITY) == 0.0);
    CHECK(phi_goe_cdf(INFINITY) == 1.0);
}

TEST_CASE("velocity density and CDF against high-precision references") {
    for (const auto& r : kPicketFence) {
        CAPTURE(r.channels);
        CAPTURE(r.y);
        CHECK(velocity_pdf(r.y, r.channels, SpectrumKind::picket_fence) == doctest::Approx(r.pdf).epsilon(1e-8));
        CHECK(std::abs(velocity_cdf(r.y, r.channels, SpectrumKind::picket_fence) - r.cdf) < 1e-9);
        CHECK(std::abs(velocity_cdf(-r.y, r.channels, SpectrumKind::picket_fence) - (1.0 - r.cdf)) < 1e-9);
    }
    for (const auto& r : kGoe) {
        CAPTURE(r.channels);
        CAPTURE(r.y);
        CHECK(velocity_pdf(r.y, r.channels, SpectrumKind::goe) == doctest::Approx(r.pdf).epsilon(1e-8));
        CHECK(std::abs(velocity_cdf(r.y, r.channels, SpectrumKind::goe) - r.cdf) < 1e-9);
    }
    CHECK(velocity_pdf(50.0, 2, SpectrumKind::goe) == doctest::Approx(2.673009422823962e-6).epsilon(1e-8));
    CHECK(velocity_pdf(500.0, 2, SpectrumKind::goe) == doctest::Approx(2.666730660907025e-9).epsilon(1e-8));
}

TEST_CASE("velocity density: normalization, symmetry, moments") {
    for (auto kind : {SpectrumKind::picket_fence, SpectrumKind::goe}) {
        for (int m : {2, 5, 10}) {
            CAPTURE(m);
            const double mass = 2.0 * half_line([&](double y) { return velocity_pdf(y, m, kind); }, 60);
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
            CHECK(velocity_pdf(1.3, m, kind) == velocity_pdf(-1.3, m, kind));
        }
    }
    for (int m : {2, 5}) {
        const double var =
            2.0 * half_line([&](double y) { return y * y * velocity_pdf(y, m, SpectrumKind::picket_fence); }, 60);
        CHECK(var == doctest::Approx(m / 3.0).epsilon(1e-6));
    }
}

TEST_CASE("velocity density: singular point and tail slope") {
    CHECK_THROWS_AS(velocity_pdf(0.0, 1, SpectrumKind::picket_fence), SingularPointError);
    CHECK_THROWS_AS(velocity_pdf(0.0, 1, SpectrumKind::goe), SingularPointError);
    CHECK(std::isfinite(velocity_pdf(0.0, 2, SpectrumKind::goe)));
    CHECK(velocity_pdf(0.0, 2, SpectrumKind::picket_fence) == doctest::Approx(kPi / 4.0 * std::sqrt(kPi / 2.0)).epsilon(1e-10));
    for (int m : {1, 2, 5}) {
        const double slope = std::log(velocity_pdf(2000.0, m, SpectrumKind::goe) / velocity_pdf(1000.0, m, SpectrumKind::goe)) /
                             std::log(2.0);
        CHECK(std::abs(slope + 3.0) < 0.05);
    }
}

TEST_CASE("large-M limit") {
    for (double y : {0.0, 0.5, 2.0}) CHECK(large_m_limit_pf(y, 1) == phi_pf(y));
    const double mass = 2.0 * half_line([](double y) { return large_m_limit_pf(y, 7); }, 200);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

    // The mixture approaches the scaled limit as M grows.
    double previous = INFINITY;
    for (int m : {1, 2, 5, 10, 50}) {
        double sup = 0.0;
        const double scale = std::sqrt(static_cast<double>(m));
        for (int i = 1; i <= 60; ++i) {
            const double y = scale * (-3.0 + 6.0 * (i - 0.5) / 60.0);
            sup = std::max(sup, std::abs(velocity_pdf(y, m, SpectrumKind::picket_fence) - large_m_limit_pf(y, m)) * scale);
        }
        CHECK(sup < previous);
        previous = sup;
    }
}

TEST_CASE("CDF inversion") {
    const double q = invert_cdf(phi_pf_cdf, 0.9);
    CHECK(q == doctest::Approx(std::log(9.0) / kPi).epsilon(1e-11));
    CHECK_THROWS_AS(invert_cdf(phi_pf_cdf, 1.0), InvalidArgument);
    const double m = invert_cdf([](double y) { return velocity_cdf(y, 3, SpectrumKind::goe); }, 0.25, 1e-10);
    CHECK(velocity_cdf(m, 3, SpectrumKind::goe) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("spectrum kind names") {
    CHECK(parse_spectrum_kind("pf") == SpectrumKind::picket_fence);
    CHECK(parse_spectrum_kind("goe") == SpectrumKind::goe);
    CHECK(to_string(SpectrumKind::picket_fence) == "picket-fence");
    CHECK_THROWS_AS(parse_spectrum_kind("gue"), InvalidArgument);
}
