#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "resodyn/types.hpp"

namespace resodyn {

/**
 * Effective non-Hermitian Hamiltonian H - (i/2) A A^T of an open system with
 * a real symmetric interior part H (N x N) and real decay amplitudes A
 * (N x M, one column per open channel).
 *
 * Instances are immutable and always valid; construct through build().
 */
class EffectiveHamiltonian {
public:
    /// Throws InvalidArgument on shape mismatch or if H is asymmetric
    /// beyond `symmetry_tolerance` (absolute, per entry).
    static EffectiveHamiltonian build(const RealMatrix& hermitian_part, const RealMatrix& coupling,
                                      double symmetry_tolerance = 1e-12);

    std::size_t levels() const noexcept { return static_cast<std::size_t>(h_.rows()); }
    std::size_t channels() const noexcept { return static_cast<std::size_t>(a_.cols()); }

    const RealMatrix& hermitian_part() const noexcept { return h_; }
    const RealMatrix& coupling() const noexcept { return a_; }
    /// A A^T, positive semidefinite.
    const RealMatrix& coupling_gram() const noexcept { return w_; }

    /// Dense complex symmetric matrix H - (i/2) A A^T.
    ComplexMatrix matrix() const;

    /// H + strength * V with the same coupling; V must be real symmetric.
    EffectiveHamiltonian perturbed(const RealMatrix& v, double strength) const;

private:
    EffectiveHamiltonian(RealMatrix h, RealMatrix a);

    RealMatrix h_;
    RealMatrix a_;
    RealMatrix w_;
};

/// One resonance E - (i/2) Gamma. The complex value is derived from the two
/// stored reals, so value() == energy - i*width/2 holds exactly.
struct ComplexResonance {
    double energy = 0.0;
    double width = 0.0;

    Complex value() const noexcept { return {energy, -0.5 * width}; }

    static ComplexResonance from_value(Complex z) noexcept { return {z.real(), -2.0 * z.imag()}; }
};

/**
 * Resonances with paired right/left eigenvectors normalized so that
 * <L_n|R_m> = delta_nm. Right vectors are stored as columns, left vectors as
 * rows (the bra components, no conjugation implied).
 */
class BiorthogonalSystem {
public:
    BiorthogonalSystem(std::vector<ComplexResonance> resonances, ComplexMatrix right, ComplexMatrix left);

    std::size_t size() const noexcept { return resonances_.size(); }
    const std::vector<ComplexResonance>& resonances() const noexcept { return resonances_; }
    const ComplexResonance& resonance(std::size_t n) const { return resonances_.at(n); }

    const ComplexMatrix& right_vectors() const noexcept { return right_; }
    const ComplexMatrix& left_vectors() const noexcept { return left_; }
    ComplexVector right(std::size_t n) const { return right_.col(static_cast<Eigen::Index>(n)); }
    /// Row of bra components of <L_n|.
    ComplexVector left(std::size_t n) const { return left_.row(static_cast<Eigen::Index>(n)).transpose(); }

    /// Relabel: result(i) = this(permutation[i]).
    BiorthogonalSystem permuted(const std::vector<std::size_t>& permutation) const;

    /// max |<L_n|R_m> - delta_nm|.
    double biorthogonality_error() const;
    /// || sum_n |R_n><L_n| - 1 ||_F.
    double completeness_error() const;

private:
    std::vector<ComplexResonance> resonances_;
    ComplexMatrix right_;
    ComplexMatrix left_;
};

struct DiagonalizeOptions {
    /// Minimum complex eigenvalue separation, relative to the spectral radius.
    double degeneracy_tolerance = 1e-10;
    /// Abort when |R^T R| < tolerance * ||R||^2 (self-orthogonal eigenvector).
    double self_orthogonality_tolerance = 1e-10;
    /// Run the biorthogonality/completeness checks after normalizing.
    bool verify = false;
    double biorthogonality_tolerance = 1e-10;
    double completeness_tolerance = 1e-8;
};

/**
 * Biorthogonal eigensystem of a complex symmetric matrix.
 *
 * Left vectors are the plain transposes of the right ones with R_n^T R_n = 1.
 * The sign of each pair is fixed so that the largest-magnitude component of
 * R_n has a nonnegative real part. Resonances are ordered by ascending energy,
 * ties by ascending width.
 *
 * Throws ExceptionalPointError when two eigenvalues are closer than the
 * degeneracy tolerance or an eigenvector is self-orthogonal; NumericalError
 * if the eigensolver does not converge or verification fails.
 */
BiorthogonalSystem diagonalize(const ComplexMatrix& complex_symmetric, const DiagonalizeOptions& options = {});
BiorthogonalSystem diagonalize(const EffectiveHamiltonian& h, const DiagonalizeOptions& options = {});

/**
 * Eigenvalues only, in diagonalize() order, without the exceptional-point
 * checks. The workspace is reused, so long parameter sweeps over same-size
 * matrices do not allocate.
 */
class SpectrumSolver {
public:
    /// Throws NumericalError if the eigensolver does not converge.
    const std::vector<Complex>& solve(const ComplexMatrix& complex_symmetric);

private:
    Eigen::ComplexEigenSolver<ComplexMatrix> solver_;
    std::vector<Complex> values_;
};

/// Bell-Steinberger matrix U_nm = <L_n|L_m>.
struct NonorthogonalityMatrix {
    ComplexMatrix u;
    /// max |U - U^dagger| before symmetrization.
    double hermiticity_discrepancy = 0.0;

    std::size_t size() const noexcept { return static_cast<std::size_t>(u.rows()); }
    Complex operator()(std::size_t n, std::size_t m) const {
        return u(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    }
};

NonorthogonalityMatrix bell_steinberger(const BiorthogonalSystem& sys);

/// Result of match_resonances: permutation[i] is the index in `current`
/// that continues resonance i of `previous`.
struct ResonanceMatching {
    std::vector<std::size_t> permutation;
    double total_cost = 0.0;
    bool ambiguous = false;
    std::string warning;

    bool is_identity() const;
};

/**
 * Continuous relabeling between two spectra, minimizing the summed
 * complex-plane distance between matched eigenvalues. Greedy nearest
 * neighbour; collisions are resolved by an optimal assignment restricted to
 * the conflicted subset. Flags `ambiguous` when exchanging two matches
 * changes the total cost by less than `ambiguity_tolerance`.
 */
ResonanceMatching match_resonances(const std::vector<Complex>& previous, const std::vector<Complex>& current,
                                   double ambiguity_tolerance = 1e-12);
ResonanceMatching match_resonances(const BiorthogonalSystem& previous, const BiorthogonalSystem& current,
                                   double ambiguity_tolerance = 1e-12);

std::vector<Complex> eigenvalues(const BiorthogonalSystem& sys);

}  // namespace resodyn
