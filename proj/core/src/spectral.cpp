#include "resodyn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "resodyn/errors.hpp"

namespace resodyn {

namespace {

void require_symmetric(const RealMatrix& m, double tolerance, const char* name) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << name << " must be square, got " << m.rows() << "x" << m.cols();
        throw InvalidArgument(os.str());
    }
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > tolerance) {
        std::ostringstream os;
        os << name << " is not symmetric (max |M - M^T| = " << asym << ")";
        throw InvalidArgument(os.str());
    }
}

RealMatrix symmetrized(const RealMatrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

EffectiveHamiltonian::EffectiveHamiltonian(RealMatrix h, RealMatrix a)
    : h_(std::move(h)), a_(std::move(a)), w_(a_ * a_.transpose()) {
    w_ = symmetrized(w_);
}

EffectiveHamiltonian EffectiveHamiltonian::build(const RealMatrix& hermitian_part, const RealMatrix& coupling,
                                                 double symmetry_tolerance) {
    if (hermitian_part.rows() < 1) throw InvalidArgument("effective Hamiltonian needs at least one level");
    require_symmetric(hermitian_part, symmetry_tolerance, "hermitian part H");
    if (coupling.rows() != hermitian_part.rows()) {
        std::ostringstream os;
        os << "coupling A has " << coupling.rows() << " rows, expected " << hermitian_part.rows();
        throw InvalidArgument(os.str());
    }
    if (coupling.cols() < 1) throw InvalidArgument("coupling A needs at least one channel");
    if (!hermitian_part.allFinite() || !coupling.allFinite()) throw InvalidArgument("non-finite matrix entry");
    return EffectiveHamiltonian(symmetrized(hermitian_part), coupling);
}

ComplexMatrix EffectiveHamiltonian::matrix() const {
    ComplexMatrix m(h_.rows(), h_.cols());
    m.real() = h_;
    m.imag() = -0.5 * w_;
    return m;
}

EffectiveHamiltonian EffectiveHamiltonian::perturbed(const RealMatrix& v, double strength) const {
    if (v.rows() != h_.rows()) throw InvalidArgument("perturbation has wrong dimension");
    require_symmetric(v, 1e-12, "perturbation V");
    return EffectiveHamiltonian(symmetrized(h_ + strength * v), a_);
}

BiorthogonalSystem::BiorthogonalSystem(std::vector<ComplexResonance> resonances, ComplexMatrix right,
                                       ComplexMatrix left)
    : resonances_(std::move(resonances)), right_(std::move(right)), left_(std::move(left)) {
    const auto n = static_cast<Eigen::Index>(resonances_.size());
    if (right_.rows() != n || right_.cols() != n || left_.rows() != n || left_.cols() != n) {
        throw InvalidArgument("biorthogonal system: vector blocks do not match resonance count");
    }
}

BiorthogonalSystem BiorthogonalSystem::permuted(const std::vector<std::size_t>& permutation) const {
    if (permutation.size() != size()) throw InvalidArgument("permutation has wrong length");
    std::vector<ComplexResonance> res(size());
    ComplexMatrix r(right_.rows(), right_.cols());
    ComplexMatrix l(left_.rows(), left_.cols());
    for (std::size_t i = 0; i < size(); ++i) {
        const std::size_t j = permutation[i];
        if (j >= size()) throw InvalidArgument("permutation index out of range");
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        res[i] = resonances_[j];
        r.col(ii) = right_.col(jj);
        l.row(ii) = left_.row(jj);
    }
    return BiorthogonalSystem(std::move(res), std::move(r), std::move(l));
}

double BiorthogonalSystem::biorthogonality_error() const {
    const ComplexMatrix g = left_ * right_;
    return (g - ComplexMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

double BiorthogonalSystem::completeness_error() const {
    const ComplexMatrix p = right_ * left_;
    return (p - ComplexMatrix::Identity(p.rows(), p.cols())).norm();
}

BiorthogonalSystem diagonalize(const ComplexMatrix& m, const DiagonalizeOptions& options) {
    if (m.rows() != m.cols() || m.rows() < 1) throw InvalidArgument("diagonalize: matrix must be square and nonempty");
    const Eigen::Index n = m.rows();

    Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, true);
    if (solver.info() != Eigen::Success) throw NumericalError("diagonalize: eigensolver did not converge");

    const ComplexVector& values = solver.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const auto ra = ComplexResonance::from_value(values(a));
        const auto rb = ComplexResonance::from_value(values(b));
        if (ra.energy != rb.energy) return ra.energy < rb.energy;
        return ra.width < rb.width;
    });

    double radius = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) radius = std::max(radius, std::abs(values(i)));
    const double min_gap = options.degeneracy_tolerance * radius;
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const double gap = std::abs(values(order[i]) - values(order[j]));
            if (gap < min_gap) {
                std::ostringstream os;
                os << "exceptional-point proximity: resonances " << i << " and " << j
                   << " are separated by " << gap << " (tolerance " << min_gap << ")";
                throw ExceptionalPointError(i, j, os.str());
            }
        }
    }

    std::vector<ComplexResonance> resonances(static_cast<std::size_t>(n));
    ComplexMatrix right(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        resonances[static_cast<std::size_t>(k)] = ComplexResonance::from_value(values(src));

        ComplexVector r = solver.eigenvectors().col(src);
        const double norm2 = r.squaredNorm();
        const Complex pairing = (r.transpose() * r)(0);
        if (std::abs(pairing) < options.self_orthogonality_tolerance * norm2) {
            std::ostringstream os;
            os << "exceptional-point proximity: eigenvector of resonance " << k
               << " is self-orthogonal (|R^T R| = " << std::abs(pairing) << ")";
            throw ExceptionalPointError(static_cast<std::size_t>(k), static_cast<std::size_t>(k), os.str());
        }
        r /= std::sqrt(pairing);

        Eigen::Index largest = 0;
        r.cwiseAbs().maxCoeff(&largest);
        if (r(largest).real() < 0.0) r = -r;
        right.col(k) = r;
    }
    ComplexMatrix left = right.transpose();

    BiorthogonalSystem sys(std::move(resonances), std::move(right), std::move(left));
    if (options.verify) {
        const double bio = sys.biorthogonality_error();
        const double comp = sys.completeness_error();
        if (bio > options.biorthogonality_tolerance || comp > options.completeness_tolerance) {
            std::ostringstream os;
            os << "diagonalize: verification failed (biorthogonality " << bio << ", completeness " << comp << ")";
            throw NumericalError(os.str());
        }
    }
    return sys;
}

BiorthogonalSystem diagonalize(const EffectiveHamiltonian& h, const DiagonalizeOptions& options) {
    return diagonalize(h.matrix(), options);
}

const std::vector<Complex>& SpectrumSolver::solve(const ComplexMatrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) throw InvalidArgument("SpectrumSolver: matrix must be square and nonempty");
    solver_.compute(m, false);
    if (solver_.info() != Eigen::Success) throw NumericalError("SpectrumSolver: eigensolver did not converge");
    const ComplexVector& values = solver_.eigenvalues();
    values_.assign(values.data(), values.data() + values.size());
    std::sort(values_.begin(), values_.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() > b.imag();
    });
    return values_;
}

NonorthogonalityMatrix bell_steinberger(const BiorthogonalSystem& sys) {
    // Rows of L are the bras <L_n|, so the kets |L_m> are conj(L_m) and
    // <L_n|L_m> = sum_k L_nk conj(L_mk).
    const ComplexMatrix& l = sys.left_vectors();
    ComplexMatrix u = l * l.adjoint();
    NonorthogonalityMatrix out;
    out.hermiticity_discrepancy = (u - u.adjoint()).cwiseAbs().maxCoeff();
    out.u = 0.5 * (u + u.adjoint());
    return out;
}

std::vector<Complex> eigenvalues(const BiorthogonalSystem& sys) {
    std::vector<Complex> out;
    out.reserve(sys.size());
    for (const auto& r : sys.resonances()) out.push_back(r.value());
    return out;
}

}  // namespace resodyn
