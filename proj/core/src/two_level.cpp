#include "resodyn/two_level.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "resodyn/errors.hpp"

namespace resodyn::two_level {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRoundoff = 1e-14;

}  // namespace

void Params::validate() const {
    for (double x : {delta, gamma1, gamma2, theta, d, v, alpha}) {
        if (!std::isfinite(x)) throw InvalidArgument("two-level parameters must be finite");
    }
    if (gamma1 < 0.0 || gamma2 < 0.0) {
        std::ostringstream os;
        os << "two-level widths must be nonnegative (gamma1 = " << gamma1 << ", gamma2 = " << gamma2 << ")";
        throw InvalidArgument(os.str());
    }
}

Complex principal_sqrt(Complex z) {
    Complex r = std::sqrt(z);
    if (r.real() < 0.0 || (r.real() == 0.0 && r.imag() < 0.0)) r = -r;
    // Canonicalize signed zeros so identical inputs give identical labels.
    return {r.real() + 0.0, r.imag() + 0.0};
}

bool is_exceptional(const Params& p, Complex epsilon, Complex nu) {
    const double scale = std::max({std::abs(epsilon), std::abs(nu), std::abs(p.delta)});
    const double tol = 1e-10 * scale;
    return std::abs(epsilon - nu) < tol || std::abs(epsilon + nu) < tol;
}

MixingState mixing_state(const Params& p) {
    p.validate();
    MixingState s;
    s.epsilon = Complex(p.delta + 2.0 * p.alpha * p.d, -0.5 * (p.gamma1 - p.gamma2));
    s.nu = Complex(std::sqrt(p.gamma1 * p.gamma2) * std::cos(p.theta), 2.0 * p.alpha * p.v);
    s.branch_root = principal_sqrt(s.epsilon * s.epsilon - s.nu * s.nu);
    const Complex denominator = s.epsilon + s.branch_root;
    if (s.nu == Complex{}) {
        s.f = Complex{};
    } else if (std::abs(s.nu) > std::abs(denominator)) {
        // Same value, written without the cancellation in epsilon + root.
        s.f = (s.epsilon - s.branch_root) / s.nu;
    } else {
        s.f = s.nu / denominator;
    }
    s.exceptional = is_exceptional(p, s.epsilon, s.nu);
    return s;
}

ComplexMatrix hamiltonian(const Params& p) {
    p.validate();
    const double coupling = std::sqrt(p.gamma1 * p.gamma2) * std::cos(p.theta);
    ComplexMatrix h(2, 2);
    h(0, 0) = Complex(0.5 * p.delta + p.alpha * p.d, -0.5 * p.gamma1);
    h(1, 1) = Complex(-0.5 * p.delta - p.alpha * p.d, -0.5 * p.gamma2);
    h(0, 1) = Complex(p.alpha * p.v, -0.5 * coupling);
    h(1, 0) = h(0, 1);
    return h;
}

EffectiveHamiltonian effective_hamiltonian(const Params& p) {
    p.validate();
    RealMatrix h(2, 2);
    h << 0.5 * p.delta + p.alpha * p.d, p.alpha * p.v, p.alpha * p.v, -0.5 * p.delta - p.alpha * p.d;
    RealMatrix a(2, 2);
    const double s1 = std::sqrt(p.gamma1);
    const double s2 = std::sqrt(p.gamma2);
    a << s1, 0.0, s2 * std::cos(p.theta), s2 * std::sin(p.theta);
    return EffectiveHamiltonian::build(h, a);
}

ResonancePair closed_form_resonances(const Params& p) {
    const MixingState s = mixing_state(p);
    const Complex center = -0.25 * kI * (p.gamma1 + p.gamma2);
    return {center + 0.5 * s.branch_root, center - 0.5 * s.branch_root, s.exceptional};
}

NonorthogonalityMatrix nonorthogonality(Complex f, double tolerance) {
    const double gap = std::abs(1.0 - f * f);
    if (gap < tolerance) {
        std::ostringstream os;
        os << "exceptional point: self-orthogonal states (|1 - f^2| = " << gap << ")";
        throw ExceptionalPointError(0, 1, os.str());
    }
    const double norm2 = 1.0 / gap;
    const double diag = norm2 * (1.0 + std::norm(f));
    const double off = 2.0 * norm2 * f.real();
    NonorthogonalityMatrix u;
    u.u.resize(2, 2);
    u.u(0, 0) = diag;
    u.u(1, 1) = diag;
    u.u(0, 1) = Complex(0.0, -off);
    u.u(1, 0) = Complex(0.0, off);
    return u;
}

namespace {

double velocity_denominator(Complex f, double tolerance) {
    // Equals |1 - f^2|^2; vanishes only at f = +-1.
    const double mod2 = std::norm(f);
    const double den = (1.0 + mod2) * (1.0 + mod2) - 4.0 * f.real() * f.real();
    if (den < tolerance) {
        std::ostringstream os;
        os << "exceptional point: velocity denominator collapsed to " << den;
        throw ExceptionalPointError(0, 1, os.str());
    }
    return den;
}

}  // namespace

VelocityPair width_velocity(Complex f, double d, double v, double tolerance) {
    const double den = velocity_denominator(f, tolerance);
    const double mod2 = std::norm(f);
    const double g = 4.0 * f.real() * (v * (1.0 - mod2) - 2.0 * d * f.imag()) / den;
    return {g, -g};
}

VelocityPair energy_velocity(Complex f, double d, double v, double tolerance) {
    const double den = velocity_denominator(f, tolerance);
    const double mod2 = std::norm(f);
    const double e = (1.0 + mod2) * (d * (1.0 - mod2) + 2.0 * v * f.imag()) / den;
    return {e, -e};
}

double exceptional_point_distance(const Params& p) {
    const MixingState s = mixing_state(p);
    return std::min(std::abs(s.epsilon - s.nu), std::abs(s.epsilon + s.nu));
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
    if (count == 0) throw InvalidArgument("grid needs at least one point");
    if (count == 1) return {lo};
    std::vector<double> grid(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) grid[i] = lo + step * static_cast<double>(i);
    grid.back() = hi;
    return grid;
}

Trajectory sweep(const Params& p, const std::vector<double>& alpha_grid) {
    p.validate();
    for (std::size_t i = 1; i < alpha_grid.size(); ++i) {
        if (!(alpha_grid[i] > alpha_grid[i - 1])) throw InvalidArgument("sweep: alpha grid must be strictly increasing");
    }

    Trajectory out;
    out.rows.reserve(alpha_grid.size());
    std::size_t segment = 0;
    bool have_previous = false;
    std::vector<Complex> previous(2);
    bool swapped = false;

    for (double alpha : alpha_grid) {
        const Params q = p.at(alpha);
        const MixingState s = mixing_state(q);
        const ResonancePair pair = closed_form_resonances(q);

        TrajectoryRow row;
        row.alpha = alpha;
        row.f = s.f;
        row.ep_distance = std::min(std::abs(s.epsilon - s.nu), std::abs(s.epsilon + s.nu));
        row.segment = segment;

        if (s.exceptional) {
            row.exceptional = true;
            row.e1 = pair.first.real();
            row.e2 = pair.second.real();
            row.gamma1 = -2.0 * pair.first.imag();
            row.gamma2 = -2.0 * pair.second.imag();
            row.width_velocity = row.energy_velocity = row.u11 = row.u12_imag = kNaN;
            out.rows.push_back(row);
            ++segment;
            have_previous = false;
            swapped = false;
            continue;
        }

        if (have_previous) {
            const auto matching = match_resonances(previous, {pair.first, pair.second});
            if (matching.ambiguous) ++out.ambiguous_steps;
            swapped = matching.permutation[0] == 1;
        }
        const Complex one = swapped ? pair.second : pair.first;
        const Complex two = swapped ? pair.first : pair.second;
        row.swapped = swapped;
        row.e1 = one.real();
        row.e2 = two.real();
        row.gamma1 = -2.0 * one.imag();
        row.gamma2 = -2.0 * two.imag();

        const double sign = swapped ? -1.0 : 1.0;
        row.width_velocity = sign * width_velocity(s.f, q.d, q.v).first;
        row.energy_velocity = sign * energy_velocity(s.f, q.d, q.v).first;
        const auto u = nonorthogonality(s.f);
        row.u11 = u(0, 0).real();
        row.u12_imag = sign * u(0, 1).imag();

        out.rows.push_back(row);
        previous = {one, two};
        have_previous = true;
    }
    return out;
}

double bisect_root(const std::function<double(double)>& fn, double lo, double hi, double tolerance) {
    double flo = fn(lo);
    const double fhi = fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw BracketError("bisection: no sign change in bracket");
    for (int it = 0; it < 200 && hi - lo > tolerance; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fn(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double golden_section_maximum(const std::function<double(double)>& fn, double lo, double hi, double tolerance) {
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = fn(x1);
    double f2 = fn(x2);
    for (int it = 0; it < 300 && hi - lo > tolerance; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = fn(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = fn(x1);
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

void check_bracket(double lo, double hi, const SearchOptions& options) {
    if (!(hi > lo)) throw InvalidArgument("search bracket must satisfy lo < hi");
    if (options.scan_points < 3) throw InvalidArgument("search needs at least 3 scan points");
}

double width_velocity_or_nan(const Params& p, double alpha) {
    const Params q = p.at(alpha);
    const MixingState s = mixing_state(q);
    if (s.exceptional) return kNaN;
    try {
        return width_velocity(s.f, q.d, q.v).first;
    } catch (const ExceptionalPointError&) {
        return kNaN;
    }
}

}  // namespace

double find_alpha_star(const Params& p, double lo, double hi, const SearchOptions& options) {
    check_bracket(lo, hi, options);
    const auto grid = linear_grid(lo, hi, options.scan_points);
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double g = std::abs(width_velocity_or_nan(p, grid[i]));
        if (std::isfinite(g) && g > best_value) {
            best_value = g;
            best = i;
        }
    }
    if (!(best_value > kRoundoff * (std::abs(p.d) + std::abs(p.v)))) {
        throw BracketError("find_alpha_star: width velocity vanishes throughout the bracket (orthogonal states)");
    }
    if (best == 0 || best + 1 == grid.size()) {
        throw BracketError("find_alpha_star: no interior maximum of |dGamma/dalpha| in bracket");
    }
    auto objective = [&](double a) {
        const double g = std::abs(width_velocity_or_nan(p, a));
        return std::isfinite(g) ? g : -1.0;
    };
    return golden_section_maximum(objective, grid[best - 1], grid[best + 1], options.tolerance);
}

double find_alpha_circ(const Params& p, double lo, double hi, const SearchOptions& options) {
    check_bracket(lo, hi, options);
    const auto grid = linear_grid(lo, hi, options.scan_points);
    auto re_f = [&](double a) { return mixing_state(p.at(a)).f.real(); };
    // Re f at the rounding level (e.g. cos(pi/2) != 0) carries no sign.
    auto negligible = [](double x) { return std::abs(x) <= kRoundoff; };
    double prev = 0.0;
    double prev_alpha = grid[0];
    for (double a : grid) {
        const double cur = re_f(a);
        if (negligible(cur)) continue;
        if (!negligible(prev) && (cur > 0.0) != (prev > 0.0)) {
            return bisect_root(re_f, prev_alpha, a, options.tolerance);
        }
        prev = cur;
        prev_alpha = a;
    }
    throw BracketError("find_alpha_circ: no sign change of Re f in bracket");
}

}  // namespace resodyn::two_level
