#include "resodyn/cli/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "resodyn/cli/commands.hpp"
#include "resodyn/cli/output.hpp"
#include "resodyn/cli/schema.hpp"
#include "resodyn/distributions.hpp"
#include "resodyn/ensemble.hpp"
#include "resodyn/errors.hpp"
#include "resodyn/goodness_of_fit.hpp"
#include "resodyn/parallel.hpp"
#include "resodyn/perturbation.hpp"
#include "resodyn/two_level.hpp"

namespace resodyn::cli {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

// Outcome of one check body: pass flag and a one-line detail.
struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string num(double x) {
    std::ostringstream os;
    os.precision(3);
    os << x;
    return os.str();
}

// The picket-fence base density as seen by the checks; the fault fixture
// replaces pi by 3 (still a normalized density, just the wrong one).
struct BaseDensity {
    double c = kPi;
    double pdf(double y) const {
        const double a = std::abs(y);
        if (c * a > 700.0) return 0.0;
        return c / (2.0 * (1.0 + std::cosh(c * a)));
    }
    double cdf(double y) const { return 1.0 / (1.0 + std::exp(-c * y)); }
};

// int_0^inf fn with tanh-sinh on [0, 1] and exp-sinh beyond.
double half_line(const std::function<double(double)>& fn) {
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    return ts.integrate(fn, 0.0, 1.0) + es.integrate(fn, 1.0, std::numeric_limits<double>::infinity());
}

two_level::Params random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    two_level::Params p;
    p.delta = 0.1 + 2.0 * u(rng);
    p.gamma1 = 1.5 * u(rng);
    p.gamma2 = 1.5 * u(rng);
    p.theta = kPi * u(rng);
    p.d = 2.0 * u(rng) - 1.0;
    p.v = 2.0 * u(rng) - 1.0;
    p.alpha = 2.0 * u(rng) - 1.0;
    return p;
}

two_level::Params reference_params() {
    two_level::Params p;
    p.delta = 1.0;
    p.gamma1 = 0.5;
    p.gamma2 = 0.5;
    p.theta = kPi / 10.0;
    p.d = 1.0;
    p.v = 0.75;
    return p;
}

RealMatrix gaussian_symmetric(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    RealMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) m(i, j) = m(j, i) = g(rng);
    }
    return m;
}

RealMatrix gaussian(int rows, int cols, std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    RealMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = g(rng);
    }
    return m;
}

// ---- deterministic checks ---------------------------------------------------

Outcome check_sum_rules(std::mt19937_64& rng) {
    double worst = 0.0;
    std::size_t rows = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto p = random_params(rng);
        const double scale = p.gamma1 + p.gamma2 + std::abs(p.delta);
        for (const auto& r : two_level::sweep(p, two_level::linear_grid(-2.0, 2.0, 101)).rows) {
            worst = std::max({worst, std::abs(r.e1 + r.e2) / scale,
                              std::abs(r.gamma1 + r.gamma2 - p.gamma1 - p.gamma2) / scale});
            ++rows;
        }
    }
    return {worst <= 1e-12, std::to_string(rows) + " rows, max scaled residual " + num(worst)};
}

Outcome check_closed_form(std::mt19937_64& rng) {
    double worst = 0.0;
    std::size_t skipped = 0;
    for (int i = 0; i < 2000; ++i) {
        const auto p = random_params(rng);
        const auto pair = two_level::closed_form_resonances(p);
        std::optional<BiorthogonalSystem> sys;
        try {
            sys = diagonalize(two_level::hamiltonian(p));
        } catch (const ExceptionalPointError&) {
        }
        if (!sys || pair.exceptional) {
            ++skipped;
            continue;
        }
        const auto m = match_resonances(std::vector<Complex>{pair.first, pair.second}, eigenvalues(*sys));
        worst = std::max({worst, std::abs(sys->resonance(m.permutation[0]).value() - pair.first),
                          std::abs(sys->resonance(m.permutation[1]).value() - pair.second)});
    }
    return {worst <= 1e-10, "max |closed form - eigensolver| " + num(worst) + ", " + std::to_string(skipped) +
                                " exceptional points skipped"};
}

Outcome check_biorthogonality(std::mt19937_64& rng) {
    double bio = 0.0;
    double comp = 0.0;
    for (int i = 0; i < 60; ++i) {
        const int n = 2 + i % 24;
        const auto h = EffectiveHamiltonian::build(gaussian_symmetric(n, rng), gaussian(n, 1 + i % 5, rng, 0.4));
        const auto sys = diagonalize(h);
        bio = std::max(bio, sys.biorthogonality_error());
        comp = std::max(comp, sys.completeness_error());
    }
    return {bio <= 1e-10 && comp <= 1e-8, "max biorthogonality error " + num(bio) + ", completeness " + num(comp)};
}

Outcome check_width_shift_forms(std::mt19937_64& rng) {
    double worst = 0.0;
    double total = 0.0;
    for (int i = 0; i < 40; ++i) {
        const int n = 2 + i % 24;
        const auto h = EffectiveHamiltonian::build(gaussian_symmetric(n, rng), gaussian(n, 1 + i % 3, rng, 0.5));
        const auto sys = diagonalize(h);
        const auto u = bell_steinberger(sys);
        const auto pert = InteriorPerturbation::make(gaussian_symmetric(n, rng), 0.02);
        double sum = 0.0;
        for (std::size_t k = 0; k < sys.size(); ++k) {
            const double a = first_order_shift(sys, pert, k).delta_width;
            const double b = width_shift_from_U(u, sys, pert, k);
            worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-300));
            sum += a;
        }
        total = std::max(total, std::abs(sum));
    }
    return {worst <= 1e-10 && total <= 1e-10,
            "max relative difference " + num(worst) + ", max |sum of width shifts| " + num(total)};
}

Outcome check_two_level_velocities(std::mt19937_64& rng) {
    double worst = 0.0;
    int used = 0;
    while (used < 300) {
        const auto p = random_params(rng);
        if (two_level::exceptional_point_distance(p) <= 0.1) continue;
        const double h = 1e-6;
        const auto plus = two_level::closed_form_resonances(p.at(p.alpha + h));
        const auto minus = two_level::closed_form_resonances(p.at(p.alpha - h));
        const auto base = two_level::closed_form_resonances(p);
        const std::vector<Complex> b{base.first, base.second};
        const auto mp = match_resonances(b, {plus.first, plus.second});
        const auto mm = match_resonances(b, {minus.first, minus.second});
        const Complex up = mp.permutation[0] == 0 ? plus.first : plus.second;
        const Complex down = mm.permutation[0] == 0 ? minus.first : minus.second;
        const double fd_width = -2.0 * (up.imag() - down.imag()) / (2.0 * h);
        const double fd_energy = (up.real() - down.real()) / (2.0 * h);
        const auto f = two_level::mixing_state(p).f;
        const double g = two_level::width_velocity(f, p.d, p.v).first;
        const double e = two_level::energy_velocity(f, p.d, p.v).first;
        const double scale = std::abs(p.d) + std::abs(p.v);
        worst = std::max({worst, std::abs(g - fd_width) / std::max(std::abs(fd_width), 1e-6 * scale),
                          std::abs(e - fd_energy) / std::max(std::abs(fd_energy), 1e-6 * scale)});
        ++used;
    }
    return {worst <= 1e-4, "300 points with EP distance > 0.1, max relative error " + num(worst)};
}

Outcome check_weak_coupling(std::mt19937_64& rng) {
    const int n = 25;
    double worst = 0.0;
    std::vector<double> levels(n);
    for (int k = 0; k < n; ++k) levels[k] = k - 0.5 * (n - 1);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::HouseholderQR<RealMatrix> qr(gaussian(n, n, rng, 1.0));
        const RealMatrix q = qr.householderQ();
        const RealMatrix h = q * RealVector::Map(levels.data(), n).asDiagonal() * q.transpose();
        const RealMatrix a = gaussian(n, 2, rng, std::sqrt(1e-3));
        const RealMatrix v = gaussian_symmetric(n, rng);
        const auto heff = EffectiveHamiltonian::build(0.5 * (h + h.transpose()), a);
        const auto pert = InteriorPerturbation::make(v, 0.0);
        const auto fd = finite_difference_velocities(heff, pert, default_velocity_step(heff, pert));
        double err = 0.0;
        double ref = 0.0;
        for (int k = 0; k < n; ++k) {
            const double weak = weak_coupling_width_velocity(levels, q, a, v, static_cast<std::size_t>(k));
            err = std::max(err, std::abs(weak - fd[static_cast<std::size_t>(k)].width));
            ref = std::max(ref, std::abs(fd[static_cast<std::size_t>(k)].width));
        }
        worst = std::max(worst, err / ref);
    }
    return {worst <= 1e-3, "10 instances N=25, max norm-wise relative error " + num(worst)};
}

Outcome check_reference_values() {
    const auto p = reference_params();
    const auto s = two_level::mixing_state(p);
    const double g = two_level::width_velocity(s.f, p.d, p.v).first;
    const double star = two_level::find_alpha_star(p, -2.0, 2.0);
    const double circ = two_level::find_alpha_circ(p, -2.0, 2.0);
    const bool ok = std::abs(s.f.real() - 0.25298087203958360827) < 1e-13 &&
                    std::abs(g - 0.8108355406650006654) < 1e-12 &&
                    std::abs(star + 0.17473961078862046798) < 1e-8 && std::abs(circ + 0.5) < 1e-10;
    return {ok, "f=" + num(s.f.real()) + " dGamma1=" + num(g) + " alpha*=" + num(star) + " alpha_circ=" + num(circ)};
}

Outcome check_nonorthogonality_link() {
    const auto p = reference_params();
    const auto grid = two_level::linear_grid(-2.0, 2.0, 801);
    auto gdot = [&](double a) {
        const auto q = p.at(a);
        return two_level::width_velocity(two_level::mixing_state(q).f, q.d, q.v).first;
    };
    auto ref = [&](double a) { return two_level::mixing_state(p.at(a)).f.real(); };
    std::vector<double> g_roots, f_roots;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if ((gdot(grid[i - 1]) > 0) != (gdot(grid[i]) > 0)) {
            g_roots.push_back(two_level::bisect_root(gdot, grid[i - 1], grid[i], 1e-14));
        }
        if ((ref(grid[i - 1]) > 0) != (ref(grid[i]) > 0)) {
            f_roots.push_back(two_level::bisect_root(ref, grid[i - 1], grid[i], 1e-14));
        }
    }
    bool ok = !g_roots.empty() && g_roots.size() == f_roots.size();
    double gap = 0.0;
    for (std::size_t i = 0; ok && i < g_roots.size(); ++i) gap = std::max(gap, std::abs(g_roots[i] - f_roots[i]));
    ok = ok && gap < 1e-8;
    std::size_t ig = 0, ifr = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(gdot(grid[i])) > std::abs(gdot(grid[ig]))) ig = i;
        if (std::abs(ref(grid[i])) > std::abs(ref(grid[ifr]))) ifr = i;
    }
    const double resolution = grid[1] - grid[0];
    const double argmax_gap = std::abs(grid[ig] - grid[ifr]);
    ok = ok && argmax_gap <= resolution;
    return {ok, std::to_string(g_roots.size()) + " common root(s), max offset " + num(gap) + "; argmax offset " +
                    num(argmax_gap) + " (grid step " + num(resolution) + ")"};
}

Outcome check_scan_dominance() {
    const auto p = reference_params();
    const double star = two_level::find_alpha_star(p, -2.0, 2.0);
    auto g = [&](double a) {
        const auto q = p.at(a);
        return std::abs(two_level::width_velocity(two_level::mixing_state(q).f, q.d, q.v).first);
    };
    const double at_star = g(star);
    double scan = 0.0;
    for (double a : two_level::linear_grid(-2.0, 2.0, 2001)) scan = std::max(scan, g(a));
    return {at_star >= scan, "|dGamma1| at alpha* " + num(at_star) + " vs scan maximum " + num(scan)};
}

Outcome check_base_densities(const BaseDensity& pf) {
    const double goe_mass = 2.0 * half_line(phi_goe);
    const double pf_mass = 2.0 * half_line([&](double y) { return pf.pdf(y); });
    const bool exact = phi_goe(0.0) == 2.0 / 3.0 && pf.pdf(0.0) == kPi / 4.0;
    const bool ok = exact && std::abs(goe_mass - 1.0) < 1e-10 && std::abs(pf_mass - 1.0) < 1e-10;
    return {ok, "phi_goe(0)=" + num(phi_goe(0.0)) + " phi_pf(0)=" + num(pf.pdf(0.0)) + ", masses " +
                    num(goe_mass - 1.0) + " / " + num(pf_mass - 1.0) + " from 1"};
}

Outcome check_pf_fourier(const BaseDensity& pf) {
    double worst = 0.0;
    for (double y = 0.0; y <= 5.0; y += 0.25) {
        // Characteristic function k / sinh(k) on a finite range (tail < 1e-17).
        boost::math::quadrature::tanh_sinh<double> ts;
        const double ft =
            ts.integrate([&](double k) { return std::cos(k * y) * (k == 0.0 ? 1.0 : k / std::sinh(k)); }, 0.0, 45.0) /
            kPi;
        worst = std::max(worst, std::abs(ft - pf.pdf(y)));
    }
    return {worst < 1e-8, "max |Fourier transform - phi_pf| on [0, 5]: " + num(worst)};
}

Outcome check_velocity_normalization() {
    double worst = 0.0;
    for (auto kind : {SpectrumKind::picket_fence, SpectrumKind::goe}) {
        for (int m : {2, 5, 10}) {
            const double mass = 2.0 * half_line([&](double y) { return velocity_pdf(y, m, kind); });
            worst = std::max(worst, std::abs(mass - 1.0));
        }
    }
    return {worst < 1e-6, "max |integral - 1| over M in {2,5,10}, both models: " + num(worst)};
}

Outcome check_pf_second_moment(const BaseDensity& pf) {
    double worst = 0.0;
    for (int m : {1, 2, 5, 10}) {
        // Second moment of the Porter-Thomas mixture of the base density under test.
        const double base = 2.0 * half_line([&](double y) { return y * y * pf.pdf(y); });
        const double quad = 2.0 * half_line([&](double y) { return y * y * velocity_pdf(y, m, SpectrumKind::picket_fence); });
        worst = std::max({worst, std::abs(quad - m / 3.0), std::abs(m * base - m / 3.0)});
    }
    return {worst < 1e-6, "max |<y^2> - M/3| over M in {1,2,5,10}: " + num(worst)};
}

Outcome check_goe_tail() {
    double worst = 0.0;
    for (int m : {1, 2, 5, 10}) {
        const double slope = std::log(velocity_pdf(500.0, m, SpectrumKind::goe) / velocity_pdf(50.0, m, SpectrumKind::goe)) /
                             std::log(10.0);
        worst = std::max(worst, std::abs(slope + 3.0));
    }
    return {worst <= 0.05, "max |slope + 3| on [50, 500]: " + num(worst)};
}

Outcome check_dist_trapezoid() {
    // Parses the actual output of: dist --model goe --m 2 --y-min -10 --y-max 10 --steps 2001
    DistRequest q;
    q.kind = SpectrumKind::goe;
    q.channels = 2;
    q.grid = two_level::linear_grid(-10.0, 10.0, 2001);
    std::istringstream in(dist_output(q, Provenance{"dist", json::object(), std::nullopt}, Format::csv));
    std::vector<double> y, pdf;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(row, cell, ',')) cells.push_back(std::stod(cell));
        y.push_back(cells[0]);
        pdf.push_back(cells[3]);
    }
    // Trapezoid at h and 2h, then one Richardson step; the cusp at y = 0
    // leaves an O(h^2) error in the plain rule.
    auto trapezoid = [&](std::size_t stride) {
        double sum = 0.0;
        for (std::size_t i = stride; i < y.size(); i += stride) {
            sum += 0.5 * (pdf[i] + pdf[i - stride]) * (y[i] - y[i - stride]);
        }
        return sum;
    };
    const double fine = trapezoid(1);
    const double extrapolated = (4.0 * fine - trapezoid(2)) / 3.0;
    const double tails = velocity_cdf(-10.0, 2, SpectrumKind::goe) + 1.0 - velocity_cdf(10.0, 2, SpectrumKind::goe);
    const double total = extrapolated + tails;
    return {y.size() == 2001 && std::abs(total - 1.0) < 1e-6,
            "extrapolated trapezoid " + num(extrapolated) + " + tail mass " + num(tails) + " = 1 + " + num(total - 1.0) +
                " (plain trapezoid off by " + num(fine - extrapolated) + ")"};
}

Outcome check_small_determinism(unsigned threads) {
    EnsembleConfig c;
    c.model.levels = 60;
    c.channels = 2;
    c.realizations = 40;
    c.central_window = 8;
    c.seed = 12345;
    bool same = true;
    for (auto kind : {SpectrumKind::picket_fence, SpectrumKind::goe}) {
        for (auto route : {SamplingRoute::direct_matrix, SamplingRoute::representation}) {
            c.model.kind = kind;
            c.route = route;
            c.threads = 1;
            const auto a = sample_velocities(c);
            c.threads = std::max(2u, threads);
            const auto b = sample_velocities(c);
            same = same && a.values == b.values && a.kappas == b.kappas;
        }
    }
    return {same, same ? "bit-identical for 1 and several threads" : "samples differ between thread counts"};
}

// ---- Monte-Carlo checks -----------------------------------------------------

ModelCurve curve_with_base(const BaseDensity& pf, int m) {
    ModelCurve c = velocity_curve(SpectrumKind::picket_fence, m);
    if (pf.c != kPi) {
        c.name += " [corrupted]";
        c.cdf = [pf, m](double y) { return porter_thomas_mixture_cdf(y, m, [pf](double x) { return pf.cdf(x); }); };
    }
    return c;
}

EnsembleConfig histogram_config(int m, std::uint64_t seed, unsigned threads) {
    EnsembleConfig c;
    c.model.kind = SpectrumKind::picket_fence;
    c.model.levels = 250;
    c.channels = static_cast<std::size_t>(m);
    c.realizations = 2000;
    c.central_window = 25;
    c.seed = seed;
    c.route = SamplingRoute::direct_matrix;
    c.threads = threads;
    return c;
}

double batch_error(const std::vector<double>& x, std::size_t batches) {
    const std::size_t size = x.size() / batches;
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) means[b] = pairwise_sum(x.data() + b * size, size) / static_cast<double>(size);
    return std::sqrt(sample_moments(means).variance / static_cast<double>(batches));
}

Outcome check_mc_variance(const BaseDensity& pf, std::uint64_t seed, unsigned threads) {
    const double base_var = 2.0 * half_line([&](double y) { return y * y * pf.pdf(y); });
    bool ok = true;
    std::ostringstream os;
    for (int m : {1, 2, 5, 10}) {
        EnsembleConfig c;
        c.model.kind = SpectrumKind::picket_fence;
        c.model.levels = 1001;
        c.channels = static_cast<std::size_t>(m);
        c.realizations = 2000;
        c.central_window = 25;
        c.seed = seed + static_cast<std::uint64_t>(m);
        c.route = SamplingRoute::representation;
        c.threads = threads;
        const auto s = sample_velocities(c);
        std::vector<double> sq(s.values.size());
        for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = s.values[i] * s.values[i];
        const double var = pairwise_sum(sq.data(), sq.size()) / static_cast<double>(sq.size());
        const double sigma = batch_error(sq, 100);
        const double expected = m * base_var;
        const bool pass = std::abs(var - expected) < 3.0 * sigma;
        ok = ok && pass;
        os << "M=" << m << ": " << num(var) << " vs " << num(expected) << " (" << num((var - expected) / sigma) << " sigma) ";
    }
    return {ok, os.str()};
}

}  // namespace

VerifyLevel parse_verify_level(const std::string& text) {
    if (text == "fast") return VerifyLevel::fast;
    if (text == "full") return VerifyLevel::full;
    throw UsageError("unknown verify level '" + text + "' (expected fast or full)");
}

std::vector<CheckResult> run_verify(const VerifyOptions& options, const std::function<void(const CheckResult&)>& progress) {
    if (!options.fault.empty() && options.fault != "phi-pf-constant") {
        throw UsageError("unknown fault fixture '" + options.fault + "'");
    }
    BaseDensity pf;
    if (options.fault == "phi-pf-constant") pf.c = 3.0;
    std::mt19937_64 rng(options.seed);
    const unsigned threads = options.threads;

    std::vector<CheckResult> results;
    auto run = [&](const std::string& name, const std::function<Outcome()>& body) {
        CheckResult r;
        r.name = name;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const Outcome o = body();
            r.passed = o.passed;
            r.detail = o.detail;
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        results.push_back(r);
        if (progress) progress(r);
    };

    run("two-level sum rules", [&] { return check_sum_rules(rng); });
    run("closed form matches eigensolver", [&] { return check_closed_form(rng); });
    run("biorthogonality and completeness", [&] { return check_biorthogonality(rng); });
    run("width shift: expectation vs U form, conservation", [&] { return check_width_shift_forms(rng); });
    run("two-level velocities vs finite differences", [&] { return check_two_level_velocities(rng); });
    run("weak-coupling velocity vs finite differences", [&] { return check_weak_coupling(rng); });
    run("reference-point values", [] { return check_reference_values(); });
    run("width velocity vanishes with Re f", [] { return check_nonorthogonality_link(); });
    run("alpha* dominates the dense scan", [] { return check_scan_dominance(); });
    run("base densities: exact values and normalization", [&] { return check_base_densities(pf); });
    run("picket-fence density vs Fourier transform", [&] { return check_pf_fourier(pf); });
    run("velocity density normalization", [] { return check_velocity_normalization(); });
    run("picket-fence second moment M/3 (quadrature)", [&] { return check_pf_second_moment(pf); });
    run("GOE tail exponent", [] { return check_goe_tail(); });
    run("dist grid normalization (trapezoid)", [] { return check_dist_trapezoid(); });
    run("ensemble determinism across threads", [&] { return check_small_determinism(threads); });
    if (options.level == VerifyLevel::fast) return results;

    run("picket-fence variance M/3 (Monte Carlo)", [&] { return check_mc_variance(pf, options.seed, threads); });

    std::vector<VelocitySampleSet> histogram_sets(4);
    const int channels[] = {1, 2, 5, 10};
    run("velocity histograms (chi-square, 1% level)", [&] {
        bool ok = true;
        std::ostringstream os;
        for (int i = 0; i < 4; ++i) {
            histogram_sets[i] = sample_velocities(histogram_config(channels[i], options.seed, threads));
            const auto fit = compare_histogram(histogram_sets[i].values, curve_with_base(pf, channels[i]));
            ok = ok && fit.p_value > 0.01;
            os << "M=" << channels[i] << ": p=" << num(fit.p_value) << " ";
        }
        return Outcome{ok, os.str()};
    });
    run("negative control: corrupted phi_pf rejected", [&] {
        // Independent samples per M, so the statistics and dof add up.
        BaseDensity bad;
        bad.c = 3.0;
        double chi2 = 0.0;
        double dof = 0.0;
        std::ostringstream os;
        for (int i = 0; i < 4; ++i) {
            const auto fit = compare_histogram(histogram_sets[i].values, curve_with_base(bad, channels[i]));
            chi2 += fit.chi_square;
            dof += static_cast<double>(fit.degrees_of_freedom);
            os << "M=" << channels[i] << ": p=" << num(fit.p_value) << " ";
        }
        const double p = chi_square_survival(chi2, dof);
        os << "pooled p=" << num(p);
        return Outcome{p < 1e-6, os.str()};
    });
    run("route equivalence (two-sample KS)", [&] {
        auto c = histogram_config(2, options.seed + 100, threads);
        c.realizations = 800;
        const auto direct = sample_velocities(c);
        c.route = SamplingRoute::representation;
        const auto rep = sample_velocities(c);
        const auto ks = ks_two_sample(direct.values, rep.values);
        return Outcome{ks.p_value > 0.01, "D=" + num(ks.statistic) + " p=" + num(ks.p_value)};
    });
    run("widths independent of the spectral factor", [&] {
        const auto& s = histogram_sets[0];
        std::vector<double> factor(s.values.size());
        for (std::size_t i = 0; i < factor.size(); ++i) factor[i] = std::abs(s.values[i]) / std::sqrt(s.kappas[i]);
        const auto mk = sample_moments(s.kappas);
        const auto mf = sample_moments(factor);
        double cov = 0.0;
        for (std::size_t i = 0; i < factor.size(); ++i) cov += (s.kappas[i] - mk.mean) * (factor[i] - mf.mean);
        const double rho = cov / static_cast<double>(factor.size() - 1) / std::sqrt(mk.variance * mf.variance);
        return Outcome{std::abs(rho) < 0.02, "correlation " + num(rho)};
    });
    run("sample mean and skewness consistent with zero", [&] {
        bool ok = true;
        std::ostringstream os;
        for (int i = 0; i < 4; ++i) {
            const auto& x = histogram_sets[i].values;
            std::vector<double> cube(x.size());
            for (std::size_t k = 0; k < x.size(); ++k) cube[k] = x[k] * x[k] * x[k];
            const double mean = pairwise_sum(x.data(), x.size()) / static_cast<double>(x.size());
            const double m3 = pairwise_sum(cube.data(), cube.size()) / static_cast<double>(cube.size());
            const double z1 = mean / batch_error(x, 100);
            const double z3 = m3 / batch_error(cube, 100);
            ok = ok && std::abs(z1) < 3.0 && std::abs(z3) < 3.0;
            os << "M=" << channels[i] << ": " << num(z1) << "/" << num(z3) << " sigma ";
        }
        return Outcome{ok, os.str()};
    });
    run("histogram sample CSV identical across thread counts", [&] {
        auto c = histogram_config(1, options.seed, 1);
        const Provenance prov{"ensemble", json::object(), options.seed};
        const auto serial = samples_csv(sample_velocities(c), prov);
        c.threads = std::max(2u, threads == 0 ? default_thread_count() : threads);
        const auto parallel = samples_csv(sample_velocities(c), prov);
        const bool same = serial == parallel && serial == samples_csv(histogram_sets[0], prov);
        return Outcome{same, same ? std::to_string(serial.size()) + " bytes, identical" : "CSV differs"};
    });
    return results;
}

json verify_report(const VerifyOptions& options, const std::vector<CheckResult>& results) {
    json j;
    j["tool"] = std::string(kToolName);
    j["version"] = std::string(tool_version());
    j["level"] = options.level == VerifyLevel::fast ? "fast" : "full";
    j["seed"] = options.seed;
    if (!options.fault.empty()) j["fault"] = options.fault;
    std::size_t failed = 0;
    j["checks"] = json::array();
    for (const auto& r : results) {
        j["checks"].push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}});
        if (!r.passed) ++failed;
    }
    j["passed"] = results.size() - failed;
    j["failed"] = failed;
    return j;
}

}  // namespace resodyn::cli
