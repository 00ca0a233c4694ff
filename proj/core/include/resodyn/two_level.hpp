#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "resodyn/spectral.hpp"
#include "resodyn/types.hpp"

namespace resodyn::two_level {

/**
 * Two interfering resonances: parental levels +-delta/2, partial widths
 * gamma1 and gamma2 whose decay vectors enclose the angle theta, and the
 * traceless interior perturbation alpha * [[d, v], [v, -d]].
 */
struct Params {
    double delta = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double theta = 0.0;
    double d = 0.0;
    double v = 0.0;
    double alpha = 0.0;

    /// Throws InvalidArgument on negative widths or non-finite entries.
    void validate() const;
    Params at(double new_alpha) const {
        Params p = *this;
        p.alpha = new_alpha;
        return p;
    }
};

/// sqrt on the principal branch: Re >= 0, and Im >= 0 when Re == 0.
Complex principal_sqrt(Complex z);

struct MixingState {
    Complex epsilon;      // delta + 2 alpha d - (i/2)(gamma1 - gamma2)
    Complex nu;           // sqrt(gamma1 gamma2) cos(theta) + 2 i alpha v
    Complex branch_root;  // principal sqrt(epsilon^2 - nu^2)
    Complex f;            // nu / (epsilon + branch_root)
    bool exceptional = false;
};

/// Coalescence test |epsilon -+ nu| < 1e-10 * max(|epsilon|, |nu|, |delta|).
bool is_exceptional(const Params& p, Complex epsilon, Complex nu);

MixingState mixing_state(const Params& p);

/// Entrywise 2x2 effective Hamiltonian including the alpha V term.
ComplexMatrix hamiltonian(const Params& p);

/// The same system as an EffectiveHamiltonian: H = diag(delta/2, -delta/2) +
/// alpha V and a two-channel coupling with column norms sqrt(gamma1),
/// sqrt(gamma2) at relative angle theta.
EffectiveHamiltonian effective_hamiltonian(const Params& p);

struct ResonancePair {
    Complex first;   // + sign in front of the root
    Complex second;  // - sign
    bool exceptional = false;
};

ResonancePair closed_form_resonances(const Params& p);

/// U = |N|^2 [[1+|f|^2, -2i Re f], [2i Re f, 1+|f|^2]], N^2 = 1/(1 - f^2).
/// Throws ExceptionalPointError when |1 - f^2| < `tolerance`.
NonorthogonalityMatrix nonorthogonality(Complex f, double tolerance = 1e-10);

struct VelocityPair {
    double first = 0.0;
    double second = 0.0;
};

/// dGamma_1/dalpha from the mixing parameter; second = -first.
VelocityPair width_velocity(Complex f, double d, double v, double tolerance = 1e-12);
/// dE_1/dalpha from the mixing parameter; second = -first.
VelocityPair energy_velocity(Complex f, double d, double v, double tolerance = 1e-12);

/// min(|epsilon - nu|, |epsilon + nu|).
double exceptional_point_distance(const Params& p);

struct TrajectoryRow {
    double alpha = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    Complex f;
    double width_velocity = 0.0;
    double energy_velocity = 0.0;
    double u11 = 0.0;      // real
    double u12_imag = 0.0;  // U12 is purely imaginary
    double ep_distance = 0.0;
    bool exceptional = false;
    /// Incremented after every exceptional row; labels are only continuous
    /// within a segment.
    std::size_t segment = 0;
    /// Resonance labels exchanged relative to the principal-branch labeling.
    bool swapped = false;
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;
    std::size_t ambiguous_steps = 0;
};

/// Rows follow `alpha_grid` (strictly increasing). Labels are carried from
/// row to row with match_resonances. `f` is always the principal-branch
/// mixing parameter; when a row is `swapped`, the velocity and U12 columns
/// refer to the continued labels (sign-flipped relative to f).
Trajectory sweep(const Params& p, const std::vector<double>& alpha_grid);

std::vector<double> linear_grid(double lo, double hi, std::size_t count);

struct SearchOptions {
    std::size_t scan_points = 2001;
    double tolerance = 1e-10;
};

/// Strength maximizing |dGamma_1/dalpha| inside [lo, hi]: dense scan then
/// golden-section refinement. Throws BracketError if the scan maximum sits
/// on the bracket edge or the velocity vanishes identically.
double find_alpha_star(const Params& p, double lo, double hi, const SearchOptions& options = {});

/// Strength where Re f changes sign inside [lo, hi] (orthogonal resonance
/// states), refined by bisection. Throws BracketError without a sign change.
double find_alpha_circ(const Params& p, double lo, double hi, const SearchOptions& options = {2001, 1e-12});

/// Generic scalar helpers shared by the searches.
double bisect_root(const std::function<double(double)>& fn, double lo, double hi, double tolerance);
double golden_section_maximum(const std::function<double(double)>& fn, double lo, double hi, double tolerance);

}  // namespace resodyn::two_level
