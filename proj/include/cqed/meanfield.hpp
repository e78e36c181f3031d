#pragma once

#include "cqed/params.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <vector>

namespace cqed {

/// (<a>, <s1->, <s1z>, <s2->, <s2z>) in the frame rotating with the atoms.
struct MeanFieldState {
    cplx alpha{0.0, 0.0};
    cplx beta1{0.0, 0.0};
    double zeta1 = -1.0;
    cplx beta2{0.0, 0.0};
    double zeta2 = -1.0;

    /// Both atoms in the ground state, cavity empty.
    static MeanFieldState ground() { return {}; }

    /// Throws InvalidArgument outside |zeta| <= 1, |beta| <= 1/2 (plus 1e-9).
    void check() const;

    double pseudo_spin1() const { return 4.0 * std::norm(beta1) + zeta1 * zeta1; }
};

/// Time derivative of the semiclassical equations, including sideways
/// emission of the internal atom.
MeanFieldState meanfield_rhs(const SystemParams& p, const MeanFieldState& s);

/// Largest component of meanfield_rhs.
double meanfield_residual(const SystemParams& p, const MeanFieldState& s);

struct MeanFieldOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    /// Without sideways emission the internal pseudo-spin length is an exact
    /// invariant; after every accepted step it is restored by rescaling.
    bool project_pseudo_spin = true;
};

/// States at each of the strictly increasing, non-negative times (t = 0 is `initial`).
std::vector<MeanFieldState> integrate_meanfield(const SystemParams& p, const MeanFieldState& initial,
                                                const std::vector<double>& times,
                                                const MeanFieldOptions& opts = {});

/// Atomic steady states with the cavity field adiabatically eliminated.
struct AdiabaticSteadyState {
    cplx beta1{0.0, 0.0};
    double zeta1 = -1.0;
    cplx beta2{0.0, 0.0};
    double zeta2 = -1.0;
    std::optional<double> Y_bar;  // gamma_s > 0 only
    double Y_prime = 0.0;         // internal drive divided by (1 + 2C)
    double Y_pp = 0.0;            // external drive dressed by <s1+>
    double Y_pp_limit = 0.0;      // gamma_s -> 0 limit of Y_pp
    bool bad_cavity = true;       // kappa >= 10 max(eps_d, g, gamma_s/2)
};

AdiabaticSteadyState adiabatic_steady_state(const SystemParams& p);

/// Right-hand side of the adiabatically eliminated Bloch equations (moments
/// factorized), ordered (beta1, zeta1, beta2, zeta2).
std::array<cplx, 4> adiabatic_rhs(const SystemParams& p, const AdiabaticSteadyState& s);

/// Jacobian of meanfield_rhs in the real coordinates
/// (Re a, Im a, Re b1, Im b1, z1, Re b2, Im b2, z2).
Eigen::Matrix<double, 8, 8> meanfield_jacobian(const SystemParams& p, const MeanFieldState& s);

struct MeanFieldBranch {
    MeanFieldState state;
    double residual = 0.0;     // meanfield_residual at the state
    double growth_rate = 0.0;  // largest real part of the Jacobian spectrum
};

/// The two conjugate neoclassical fixed points above threshold (Plus, Minus).
/// Without sideways emission their linearization has no decaying direction
/// transverse to the orbit (growth_rate ~ 0): nearby trajectories circle them.
/// Throws BelowThreshold below eps_d = g/2.
std::array<MeanFieldBranch, 2> meanfield_branches(const SystemParams& p);

struct ScalingPoint {
    double lambda = 0.0;
    double Y = 0.0;         // |Y| of the external drive
    double im_alpha = 0.0;  // |Im alpha|
    double abs_beta1 = 0.0;
    double zeta1 = 0.0;
    double abs_beta2 = 0.0;
    double abs_zeta2 = 0.0;
};

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    int points = 0;
};

struct CriticalScaling {
    std::vector<ScalingPoint> points;  // above-threshold points, in input order
    PowerLawFit field;                 // |Im alpha| vs |lambda - 1|
    PowerLawFit beta2;                 // |beta2| vs |lambda - 1| in the large-Y window
    PowerLawFit zeta2;                 // |zeta2| vs |lambda - 1| in the large-Y window
    double max_abs_zeta1 = 0.0;
    double max_beta1_deviation = 0.0;  // max | |beta1| - 1/2 |
};

/// Log-log fits of the neoclassical steady states across a sweep crossing
/// lambda = (g / 2 eps_d)^2 = 1. Throws InsufficientWindow when a fit window
/// holds fewer than 8 points.
CriticalScaling critical_scaling(const std::vector<SystemParams>& sweep, double min_Y = 10.0);

/// Least-squares power law y = c x^k on positive data.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cqed
