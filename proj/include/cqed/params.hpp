#pragma once

#include <complex>
#include <optional>
#include <utility>

namespace cqed {

using cplx = std::complex<double>;

/// Physical rates of the cascaded system. All rates share one user-chosen
/// reference unit; nothing in the library assumes a particular one.
///
/// - g        intracavity Jaynes-Cummings coupling
/// - kappa    cavity field half-width (photon loss rate is 2 kappa)
/// - gamma    total spontaneous emission rate of the external atom
/// - gamma_s  sideways emission rate of the internal atom
/// - eps_d    coherent drive amplitude
/// - focusing degree of focusing onto the external atom, in [0, 1]
/// - eta      collection times detection efficiency (squeezing spectra)
/// - theta    local-oscillator phase (squeezing spectra)
struct SystemParams {
    double g = 0.0;
    double kappa = 1.0;
    double gamma = 0.0;
    double gamma_s = 0.0;
    double eps_d = 0.0;
    double focusing = 0.0;
    double eta = 1.0;
    double theta = 0.0;

    /// Throws InvalidArgument when an invariant is violated.
    void validate() const;

    /// Every rate (and eps_d) multiplied by `s`; dimensionless fields untouched.
    SystemParams scaled(double s) const;

    bool internal_atom_active() const { return g > 0.0 || gamma_s > 0.0; }
    bool external_atom_active() const { return gamma > 0.0; }
};

struct DerivedParams {
    double Y = 0.0;                      // empty-cavity drive, alpha_ss = eps_d/kappa
    cplx delta{0.0, 0.0};                // (gamma/4) sqrt(1 - 8 Y^2)
    std::optional<double> coop_C;        // focusing / (2 (1 - focusing))
    double g_bar = 0.0;                  // sqrt(kappa focusing gamma / 2)
    double gamma_s_bar = 0.0;            // 2 (1 - focusing) gamma / 2
    std::optional<double> purcell_C;     // g^2 / (kappa gamma_s), gamma_s > 0 only
    std::optional<double> Y_bar;         // 2 sqrt2 g eps_d / (kappa gamma_s), gamma_s > 0 only
    double Y_prime = 0.0;                // Y_bar / (1 + 2C), finite as gamma_s -> 0
    double Y_pp = 0.0;                   // external drive dressed by the internal atom
    double Y_pp_limit = 0.0;             // gamma_s -> 0 limit of Y_pp
    std::optional<double> lambda_crit;   // (g / 2 eps_d)^2, eps_d > 0 only
};

/// Computes every derived quantity. With `need_cooperativity` set, a focusing
/// of exactly one raises DivergentCooperativity instead of leaving coop_C empty.
DerivedParams derive(const SystemParams& p, bool need_cooperativity = false);

/// Dimensionless drive 2 sqrt(2 kappa focusing / gamma) alpha for an arbitrary
/// intracavity amplitude.
cplx drive_amplitude(const SystemParams& p, cplx alpha);

/// Bloch-matrix eigenvalue shift (gamma/4) sqrt(1 - 8 Y^2), continued to
/// imaginary values above the exceptional point.
cplx bloch_shift(double gamma, double Y);

/// Y at the exceptional point, 1/(2 sqrt 2).
inline constexpr double exceptional_Y = 0.35355339059327376220;

/// Mapping cooperativity focusing/(2(1-focusing)); throws DivergentCooperativity at 1.
double mapping_cooperativity(double focusing);

/// Steady-state polarization and inversion of a coherently driven two-level
/// atom with dimensionless drive Y: beta = -Y/(sqrt2 (1+|Y|^2)), zeta = -1/(1+|Y|^2).
std::pair<cplx, double> resonance_fluorescence_state(cplx Y);

struct NeoclassicalField {
    bool bimodal = false;
    cplx plus{0.0, 0.0};   // Im >= 0 branch
    cplx minus{0.0, 0.0};  // complex conjugate of `plus`
};

/// Mean-field steady-state intracavity amplitude. Above threshold
/// (eps_d >= g/2) the pair of conjugate amplitudes; below, the single
/// alpha = 0 branch; for g = 0 the empty-cavity value eps_d/kappa.
NeoclassicalField neoclassical_field(const SystemParams& p);

struct NeoclassicalAtoms {
    cplx alpha{0.0, 0.0};
    cplx beta1{0.0, 0.0};
    double zeta1 = -1.0;
    cplx beta2{0.0, 0.0};
    double zeta2 = -1.0;
};

enum class Branch { Plus, Minus };

/// Mean-field atomic steady state on one field branch. Throws BelowThreshold
/// when g > 0 and eps_d < g/2.
NeoclassicalAtoms neoclassical_atoms(const SystemParams& p, Branch branch = Branch::Plus);

}  // namespace cqed
