#pragma once

#include <cstddef>
#include <span>

#include "resodyn/spectral.hpp"
#include "resodyn/types.hpp"

namespace resodyn {

/// Interior perturbation alpha * V with V real symmetric. The coupling to
/// the continuum is left untouched.
class InteriorPerturbation {
public:
    /// Throws InvalidArgument if V is asymmetric beyond 1e-12, or if
    /// `traceless` is set and |Tr V| > 1e-12 * ||V||_F.
    static InteriorPerturbation make(const RealMatrix& v, double strength, bool traceless = false);

    const RealMatrix& matrix() const noexcept { return v_; }
    double strength() const noexcept { return alpha_; }
    bool traceless() const noexcept { return traceless_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(v_.rows()); }

private:
    InteriorPerturbation(RealMatrix v, double alpha, bool traceless)
        : v_(std::move(v)), alpha_(alpha), traceless_(traceless) {}

    RealMatrix v_;
    double alpha_;
    bool traceless_;
};

struct ResonanceShift {
    std::size_t index = 0;
    Complex delta_value;
    double delta_energy = 0.0;
    double delta_width = 0.0;

    static ResonanceShift from_value(std::size_t n, Complex dz) noexcept {
        return {n, dz, dz.real(), -2.0 * dz.imag()};
    }
};

/// First-order shift alpha <L_n|V|R_n> with the biorthogonal pairing.
ResonanceShift first_order_shift(const BiorthogonalSystem& sys, const InteriorPerturbation& pert, std::size_t n);

/**
 * Width shift written through the nonorthogonality matrix:
 * i alpha sum_m (U_nm V_mn - V_nm U_mn), with V_nm = <R_n|V|R_m> taken with
 * conjugation on the left vector. Agrees with -2 Im of first_order_shift.
 */
double width_shift_from_U(const NonorthogonalityMatrix& u, const BiorthogonalSystem& sys,
                          const InteriorPerturbation& pert, std::size_t n);

struct WeakCouplingOptions {
    /// Minimum |E_n - E_m| in units of the mean level spacing.
    double min_separation = 1e-8;
};

/**
 * Width velocity of level n to leading order in the coupling,
 *   dGamma_n/dalpha = sum_{m != n} <m|G_n|m> / (E_n - E_m),
 *   G_n = A A^T |n><n| V + V |n><n| A A^T,
 * with |m> the columns of `eigenbasis` (orthonormal eigenvectors of H for
 * the ascending `levels`). Throws SmallDenominatorError naming (n, m).
 */
double weak_coupling_width_velocity(std::span<const double> levels, const RealMatrix& eigenbasis,
                                    const RealMatrix& coupling, const RealMatrix& v, std::size_t n,
                                    const WeakCouplingOptions& options = {});

/// Same, for H already diagonal (eigenbasis = identity).
double weak_coupling_width_velocity(std::span<const double> levels, const RealMatrix& coupling, const RealMatrix& v,
                                    std::size_t n, const WeakCouplingOptions& options = {});

struct ParametricVelocity {
    double energy = 0.0;  // dE_n/dalpha
    double width = 0.0;   // dGamma_n/dalpha
};

/// Default step 1e-6 * ||H_eff||_F / ||V||_F.
double default_velocity_step(const EffectiveHamiltonian& h, const InteriorPerturbation& pert);

/**
 * Central finite differences of E_n and Gamma_n around alpha = pert.strength()
 * with step `step`, tracking level n through match_resonances. Throws
 * NumericalError if the matching at either side is ambiguous.
 */
ParametricVelocity finite_difference_velocity(const EffectiveHamiltonian& h, const InteriorPerturbation& pert,
                                              std::size_t n, double step);

/// All levels at once; entry n corresponds to resonance n at alpha.
std::vector<ParametricVelocity> finite_difference_velocities(const EffectiveHamiltonian& h,
                                                             const InteriorPerturbation& pert, double step);

}  // namespace resodyn
