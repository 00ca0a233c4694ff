#include "resodyn/perturbation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "resodyn/errors.hpp"

namespace resodyn {

InteriorPerturbation InteriorPerturbation::make(const RealMatrix& v, double strength, bool traceless) {
    if (v.rows() != v.cols() || v.rows() < 1) throw InvalidArgument("perturbation V must be square and nonempty");
    if (!v.allFinite() || !std::isfinite(strength)) throw InvalidArgument("perturbation has non-finite entries");
    const double asym = (v - v.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) {
        std::ostringstream os;
        os << "perturbation V is not symmetric (max |V - V^T| = " << asym << ")";
        throw InvalidArgument(os.str());
    }
    if (traceless && std::abs(v.trace()) > 1e-12 * v.norm()) {
        std::ostringstream os;
        os << "perturbation flagged traceless but Tr V = " << v.trace();
        throw InvalidArgument(os.str());
    }
    return InteriorPerturbation(0.5 * (v + v.transpose()), strength, traceless);
}

namespace {

void check_index(std::size_t n, std::size_t size) {
    if (n >= size) {
        std::ostringstream os;
        os << "level index " << n << " out of range [0, " << size << ")";
        throw InvalidArgument(os.str());
    }
}

void check_dims(const BiorthogonalSystem& sys, const InteriorPerturbation& pert) {
    if (sys.size() != pert.size()) throw InvalidArgument("perturbation and eigensystem differ in dimension");
}

}  // namespace

ResonanceShift first_order_shift(const BiorthogonalSystem& sys, const InteriorPerturbation& pert, std::size_t n) {
    check_dims(sys, pert);
    check_index(n, sys.size());
    const auto k = static_cast<Eigen::Index>(n);
    const ComplexVector vr = pert.matrix().cast<Complex>() * sys.right_vectors().col(k);
    const Complex element = (sys.left_vectors().row(k) * vr)(0);
    return ResonanceShift::from_value(n, pert.strength() * element);
}

double width_shift_from_U(const NonorthogonalityMatrix& u, const BiorthogonalSystem& sys,
                          const InteriorPerturbation& pert, std::size_t n) {
    check_dims(sys, pert);
    check_index(n, sys.size());
    if (u.size() != sys.size()) throw InvalidArgument("U and eigensystem differ in dimension");
    const auto k = static_cast<Eigen::Index>(n);
    const ComplexMatrix& r = sys.right_vectors();
    const ComplexMatrix vr = pert.matrix().cast<Complex>() * r;
    // Row n and column n of V_nm = <R_n|V|R_m>.
    const Eigen::RowVectorXcd v_row = r.col(k).adjoint() * vr;
    const ComplexVector v_col = r.adjoint() * vr.col(k);
    Complex sum = (u.u.row(k) * v_col)(0) - (v_row * u.u.col(k))(0);
    return (Complex(0.0, pert.strength()) * sum).real();
}

namespace {

double mean_spacing(std::span<const double> levels) {
    if (levels.size() < 2) return 1.0;
    const double span = levels.back() - levels.front();
    return span > 0.0 ? span / static_cast<double>(levels.size() - 1) : 1.0;
}

double spacing_sum(std::span<const double> levels, const RealVector& w_col, const RealVector& v_col, std::size_t n,
                   const WeakCouplingOptions& options) {
    const double tol = options.min_separation * mean_spacing(levels);
    double sum = 0.0;
    for (std::size_t m = 0; m < levels.size(); ++m) {
        if (m == n) continue;
        const double gap = levels[n] - levels[m];
        if (std::abs(gap) < tol) {
            std::ostringstream os;
            os << "small denominator: |E_" << n << " - E_" << m << "| = " << std::abs(gap) << " below " << tol;
            throw SmallDenominatorError(n, m, os.str());
        }
        const auto mm = static_cast<Eigen::Index>(m);
        sum += 2.0 * w_col(mm) * v_col(mm) / gap;
    }
    return sum;
}

void check_weak_coupling_dims(std::size_t size, const RealMatrix& coupling, const RealMatrix& v, std::size_t n) {
    check_index(n, size);
    const auto s = static_cast<Eigen::Index>(size);
    if (coupling.rows() != s || v.rows() != s || v.cols() != s) {
        throw InvalidArgument("weak-coupling velocity: inconsistent dimensions");
    }
}

}  // namespace

double weak_coupling_width_velocity(std::span<const double> levels, const RealMatrix& eigenbasis,
                                    const RealMatrix& coupling, const RealMatrix& v, std::size_t n,
                                    const WeakCouplingOptions& options) {
    check_weak_coupling_dims(levels.size(), coupling, v, n);
    const auto s = static_cast<Eigen::Index>(levels.size());
    if (eigenbasis.rows() != s || eigenbasis.cols() != s) throw InvalidArgument("eigenbasis has wrong dimension");
    const auto k = static_cast<Eigen::Index>(n);
    // <m|G_n|m> = 2 (AA^T)_mn V_mn for real symmetric inputs.
    const RealVector basis_n = eigenbasis.col(k);
    const RealVector w_col = eigenbasis.transpose() * (coupling * (coupling.transpose() * basis_n));
    const RealVector v_col = eigenbasis.transpose() * (v * basis_n);
    return spacing_sum(levels, w_col, v_col, n, options);
}

double weak_coupling_width_velocity(std::span<const double> levels, const RealMatrix& coupling, const RealMatrix& v,
                                    std::size_t n, const WeakCouplingOptions& options) {
    check_weak_coupling_dims(levels.size(), coupling, v, n);
    const auto k = static_cast<Eigen::Index>(n);
    const RealVector w_col = coupling * coupling.row(k).transpose();
    const RealVector v_col = v.col(k);
    return spacing_sum(levels, w_col, v_col, n, options);
}

double default_velocity_step(const EffectiveHamiltonian& h, const InteriorPerturbation& pert) {
    const double vn = pert.matrix().norm();
    if (vn == 0.0) return 1e-6;
    const double hn = h.matrix().norm();
    return 1e-6 * (hn > 0.0 ? hn : 1.0) / vn;
}

namespace {

// Resonance n of `base` continued into `shifted`; throws if the continuation
// is not clear-cut.
std::vector<std::size_t> tracked(const BiorthogonalSystem& base, const BiorthogonalSystem& shifted) {
    const auto matching = match_resonances(base, shifted);
    if (matching.ambiguous) {
        throw NumericalError("finite-difference velocity: " + matching.warning + "; use a smaller step");
    }
    const auto before = eigenvalues(base);
    const auto after = eigenvalues(shifted);
    for (std::size_t i = 0; i < before.size(); ++i) {
        double nearest_other = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < before.size(); ++j) {
            if (j != i) nearest_other = std::min(nearest_other, std::abs(before[i] - before[j]));
        }
        if (std::abs(after[matching.permutation[i]] - before[i]) >= 0.5 * nearest_other) {
            std::ostringstream os;
            os << "finite-difference velocity: resonance " << i
               << " moved by more than half its distance to a neighbour; use a smaller step";
            throw NumericalError(os.str());
        }
    }
    return matching.permutation;
}

}  // namespace

std::vector<ParametricVelocity> finite_difference_velocities(const EffectiveHamiltonian& h,
                                                             const InteriorPerturbation& pert, double step) {
    if (!(step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
    if (pert.size() != h.levels()) throw InvalidArgument("perturbation and Hamiltonian differ in dimension");
    const double alpha = pert.strength();
    const auto base = diagonalize(h.perturbed(pert.matrix(), alpha));
    const auto plus = diagonalize(h.perturbed(pert.matrix(), alpha + step));
    const auto minus = diagonalize(h.perturbed(pert.matrix(), alpha - step));
    const auto up = tracked(base, plus);
    const auto down = tracked(base, minus);

    std::vector<ParametricVelocity> out(base.size());
    for (std::size_t n = 0; n < base.size(); ++n) {
        const auto& p = plus.resonance(up[n]);
        const auto& m = minus.resonance(down[n]);
        out[n].energy = (p.energy - m.energy) / (2.0 * step);
        out[n].width = (p.width - m.width) / (2.0 * step);
    }
    return out;
}

ParametricVelocity finite_difference_velocity(const EffectiveHamiltonian& h, const InteriorPerturbation& pert,
                                              std::size_t n, double step) {
    check_index(n, h.levels());
    return finite_difference_velocities(h, pert, step)[n];
}

}  // namespace resodyn
