#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "resodyn/ensemble.hpp"
#include "resodyn/errors.hpp"
#include "resodyn/goodness_of_fit.hpp"
#include "test_support.hpp"

using namespace resodyn;

namespace {

EnsembleConfig small_config(SpectrumKind kind, SamplingRoute route) {
    EnsembleConfig c;
    c.model.kind = kind;
    c.model.levels = 100;
    c.channels = 2;
    c.realizations = 50;
    c.central_window = 10;
    c.seed = 99;
    c.route = route;
    c.threads = 1;
    return c;
}

// Standard error of the mean from contiguous batch means.
double batch_standard_error(const std::vector<double>& x, std::size_t batches) {
    const std::size_t size = x.size() / batches;
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) means[b] = pairwise_sum(x.data() + b * size, size) / static_cast<double>(size);
    return std::sqrt(sample_moments(means).variance / static_cast<double>(batches));
}

}  // namespace

TEST_CASE("config validation") {
    EnsembleConfig c;
    c.central_window = 300;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = EnsembleConfig{};
    c.channels = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = EnsembleConfig{};
    c.model.spacing = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    CHECK_NOTHROW(EnsembleConfig{}.validate());
    CHECK(parse_sampling_route("direct") == SamplingRoute::direct_matrix);
    CHECK_THROWS_AS(parse_sampling_route("both"), InvalidArgument);
}

TEST_CASE("picket-fence spectrum") {
    const auto three = picket_fence_spectrum(3);
    CHECK(three == std::vector<double>{-1.0, 0.0, 1.0});
    const auto four = picket_fence_spectrum(4, 2.0);
    CHECK(four == std::vector<double>{-3.0, -1.0, 1.0, 3.0});
    CHECK(central_levels(picket_fence_spectrum(7), 3) == std::vector<std::size_t>{2, 3, 4});
    // Tie between indices 1 and 2 around zero goes to the lower index.
    CHECK(central_levels(four, 1) == std::vector<std::size_t>{1});
}

TEST_CASE("GOE normalization puts the central spacing at one") {
    const std::size_t n = 200;
    double spacing_sum = 0.0;
    std::size_t spacing_count = 0;
    double count_in_band = 0.0;
    const int samples = 40;
    for (int s = 0; s < samples; ++s) {
        Philox4x32 rng(5, static_cast<std::uint64_t>(s));
        const RealMatrix h = sample_goe(n, rng);
        CHECK((h - h.transpose()).norm() == 0.0);
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(h, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (std::abs(ev(i)) < 10.0) count_in_band += 1.0;
            if (i + 1 < ev.size() && std::abs(ev(i)) < 10.0 && std::abs(ev(i + 1)) < 10.0) {
                spacing_sum += ev(i + 1) - ev(i);
                ++spacing_count;
            }
        }
    }
    // Semicircle density at the centre is 1 per unit energy.
    CHECK(count_in_band / samples / 20.0 == doctest::Approx(1.0).epsilon(0.05));
    CHECK(spacing_sum / static_cast<double>(spacing_count) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("coupling amplitudes and Porter-Thomas widths") {
    Philox4x32 rng(8, 0);
    const double gamma_bar = 2e-3;
    const RealMatrix a = sample_couplings(100000, 3, gamma_bar, rng);
    const double var = a.squaredNorm() / static_cast<double>(a.size());
    const double se = gamma_bar * std::sqrt(2.0 / static_cast<double>(a.size()));
    CHECK(std::abs(var - gamma_bar) < 3.0 * se);

    std::vector<double> kappa(static_cast<std::size_t>(a.rows()));
    for (Eigen::Index i = 0; i < a.rows(); ++i) kappa[static_cast<std::size_t>(i)] = a.row(i).squaredNorm() / gamma_bar;
    CHECK(sample_moments(kappa).mean == doctest::Approx(3.0).epsilon(0.02));
    const auto ks = ks_test(kappa, [](double k) { return porter_thomas_cdf(k, 3); });
    CHECK(ks.p_value > 0.001);
}

TEST_CASE("representation velocity formula") {
    const auto levels = picket_fence_spectrum(5);
    const std::vector<double> z{1.0, 2.0, 0.0, -1.0, 0.5};
    const std::vector<double> v{1.0, 1.0, 7.0, 1.0, 2.0};
    // Level 2 sits at 0: sum = 1/2 + 2/1 + (-1)/(-1) + 1/(-2) = 3.
    CHECK(representation_velocity(4.0, levels, 2, z, v) == doctest::Approx(2.0 / std::numbers::pi * 3.0).epsilon(1e-15));
    CHECK(representation_velocity(0.0, levels, 2, z, v) == 0.0);
    const std::vector<double> clash{0.0, 0.0, 1.0};
    const std::vector<double> ones{1.0, 1.0, 1.0};
    CHECK(std::isnan(representation_velocity(1.0, clash, 0, ones, ones)));
}

TEST_CASE("direct velocity is invariant under rescaling V") {
    Philox4x32 rng(3, 0);
    const auto levels = picket_fence_spectrum(40);
    const RealMatrix a = sample_couplings(40, 2, 1e-3, rng);
    const RealMatrix v = sample_goe(40, rng);
    for (std::size_t n : {5u, 19u, 20u}) {
        const double y1 = direct_velocity(levels, nullptr, a, v, n, 1.0, 1e-3);
        const double y2 = direct_velocity(levels, nullptr, a, 7.5 * v, n, 1.0, 1e-3);
        CHECK(y1 == doctest::Approx(y2).epsilon(1e-13));
        // ... and under a common rescaling of widths and the mean width.
        const double y3 = direct_velocity(levels, nullptr, 2.0 * a, v, n, 1.0, 4e-3);
        CHECK(y1 == doctest::Approx(y3).epsilon(1e-13));
    }
}

TEST_CASE("sampling is deterministic and independent of the thread count") {
    for (auto route : {SamplingRoute::representation, SamplingRoute::direct_matrix}) {
        for (auto kind : {SpectrumKind::picket_fence, SpectrumKind::goe}) {
            auto c = small_config(kind, route);
            const auto a = sample_velocities(c);
            c.threads = 4;
            const auto b = sample_velocities(c);
            CHECK(a.values == b.values);
            CHECK(a.kappas == b.kappas);
            CHECK(a.values.size() == c.realizations * c.central_window - a.skipped_levels);
            c.seed += 1;
            CHECK(sample_velocities(c).values != a.values);
        }
    }
}

TEST_CASE("picket-fence representation route: first moments") {
    EnsembleConfig c;
    c.model.kind = SpectrumKind::picket_fence;
    c.model.levels = 250;
    c.channels = 3;
    c.realizations = 2000;
    c.central_window = 25;
    c.seed = 2024;
    c.route = SamplingRoute::representation;
    const auto s = sample_velocities(c);
    const auto m = sample_moments(s.values);
    const double se = batch_standard_error(s.values, 50);
    CHECK(std::abs(m.mean) < 3.0 * se);

    std::vector<double> sq(s.values.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = s.values[i] * s.values[i];
    const double se2 = batch_standard_error(sq, 50);
    // Expected variance M / 3, reduced slightly by the finite level sum.
    const double expected = 3.0 / 3.0 * (1.0 - s.truncation_deficit);
    CHECK(std::abs(m.variance - expected) < 3.0 * se2);
    CHECK(s.truncation_deficit < 0.01);
    CHECK(s.warnings.empty());

    std::vector<double> cube(s.values.size());
    for (std::size_t i = 0; i < cube.size(); ++i) cube[i] = sq[i] * s.values[i];
    CHECK(std::abs(pairwise_sum(cube.data(), cube.size()) / static_cast<double>(cube.size())) <
          3.0 * batch_standard_error(cube, 50));
}

TEST_CASE("truncation deficit warning for short spectra") {
    auto c = small_config(SpectrumKind::picket_fence, SamplingRoute::representation);
    c.model.levels = 20;
    const auto s = sample_velocities(c);
    CHECK(s.truncation_deficit > 0.01);
    CHECK(!s.warnings.empty());
}

TEST_CASE("direct route: widths are uncorrelated with the spectral factor") {
    EnsembleConfig c;
    c.model.levels = 250;
    c.channels = 1;
    c.realizations = 2000;
    c.central_window = 25;
    c.seed = 17;
    c.route = SamplingRoute::direct_matrix;
    const auto s = sample_velocities(c);
    REQUIRE(s.skipped_levels == 0);
    std::vector<double> factor(s.values.size());
    for (std::size_t i = 0; i < factor.size(); ++i) factor[i] = std::abs(s.values[i]) / std::sqrt(s.kappas[i]);
    const auto mk = sample_moments(s.kappas);
    const auto mf = sample_moments(factor);
    double cov = 0.0;
    for (std::size_t i = 0; i < factor.size(); ++i) cov += (s.kappas[i] - mk.mean) * (factor[i] - mf.mean);
    cov /= static_cast<double>(factor.size() - 1);
    CHECK(std::abs(cov / std::sqrt(mk.variance * mf.variance)) < 0.02);
}

TEST_CASE("moments helper") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const auto m = sample_moments(x);
    CHECK(m.mean == 2.5);
    CHECK(m.variance == doctest::Approx(5.0 / 3.0));
    CHECK(m.skewness == doctest::Approx(0.0));
    CHECK(pairwise_sum(x.data(), x.size()) == 10.0);
}
