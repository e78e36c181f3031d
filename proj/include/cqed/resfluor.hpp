#pragma once

#include "cqed/params.hpp"
#include "cqed/series.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace cqed {

/// Optical Bloch matrix for (sigma-, sigma+, sigma_z) of a resonantly driven
/// atom with real drive Y and emission rate gamma.
Eigen::Matrix3d bloch_matrix(double gamma, double Y);

struct BlochEigensystem {
    Eigen::Matrix3d M;
    cplx delta;
    std::array<cplx, 3> lambda;  // -gamma/2, -3gamma/4 + delta, -3gamma/4 - delta
    // Third components of the right (A) and left (A') eigenvectors and the
    // normalization products c c'. The products diverge at the exceptional point.
    cplx A2, A3, A2p, A3p;
    cplx c2c2p, c3c3p;
    bool exceptional_point = false;

    /// |A2 A2' c2c2' + A3 A3' c3c3' - 1| and |A2' c2c2' + A3' c3c3'|.
    double orthonormality_residual() const;
};

/// Requires Y > 0. Flags the exceptional point when |delta| < 1e-12 gamma.
BlochEigensystem bloch_eigensystem(double gamma, double Y);

/// sinh(z)/z, accurate through z = 0.
cplx sinhc(cplx z);

/// Closed-form resonance fluorescence of one two-level atom with emission
/// rate gamma under a real coherent drive Y. Times are physical (1/gamma
/// units); spectral arguments are the scaled detuning 2(omega - omega_A)/gamma.
class Fluorescence {
public:
    Fluorescence(double gamma, double Y);

    /// External atom of the cascaded system: gamma = p.gamma, Y from derive().
    static Fluorescence external(const SystemParams& p);

    double gamma() const { return gamma_; }
    double Y() const { return Y_; }
    cplx delta() const { return delta_; }

    double sigma_minus_ss() const;  // -Y / (sqrt2 (1 + Y^2))
    double sigma_z_ss() const;      // -1 / (1 + Y^2)

    // Fluctuation correlators <dsigma+(0) dX(tau)>.
    double corr_pm(double tau) const;
    double corr_pp(double tau) const;
    double corr_pz(double tau) const;
    /// The sigma_z correlator with the weight exactly as printed in the
    /// source, kept for comparison; it does not satisfy the regression equations.
    double corr_pz_as_printed(double tau) const;
    /// All three correlators through the eigenvector expansion.
    std::array<cplx, 3> corr_eigen(double tau) const;

    // Sandwiched correlators <sigma+(0) X(tau) sigma-(0)>.
    double sandwich_z(double tau) const;
    double sandwich_pm(double tau) const;

    /// Normalized second-order correlation of the scattered light.
    double g2(double tau) const;

    /// Unit-area incoherent spectrum. The complex form exposes the imaginary
    /// residue of the delta continuation.
    double incoherent(double w) const { return incoherent_complex(w).real(); }
    cplx incoherent_complex(double w) const;
    /// Three-Lorentzian form with explicit 1/delta weights; singular at the
    /// exceptional point.
    cplx incoherent_three_lorentzian(double w) const;

    /// Cosine transforms over the scaled delay of corr_pm and corr_pp.
    double transform_pm(double w) const;
    double transform_pp(double w) const;

private:
    double gamma_;
    double Y_;
    cplx delta_;
};

/// Critical spectrum at the exceptional point.
double incoherent_spectrum_critical(double w);

/// Unit-area incoherent spectrum of the forwards (or sideways) field.
Spectrum incoherent_spectrum(const SystemParams& p, const std::vector<double>& omega,
                             double omega_A = 0.0);

/// Homodyne squeezing spectrum of the forwards field at local-oscillator phase
/// theta. With `normalized`, divided by 16 eta <dC1+ dC1>.
Spectrum squeezing_spectrum(const SystemParams& p, double theta, const std::vector<double>& omega,
                            bool normalized = false);

/// <dC1+ dC1>_ss in rate units.
double forwards_fluctuation_intensity(const SystemParams& p);

/// Normally ordered variances of the in-phase (X1) and quadrature (X2) components.
std::pair<double, double> quadrature_variances(const SystemParams& p);

/// Normally ordered in-phase quadrature correlation <:dX1(0) dX1(tau):>.
double quadrature_correlation(const SystemParams& p, double tau);

/// Forwards photon flux <C1+ C1>_ss of the empty-cavity system (g = 0).
double forwards_flux_analytic(const SystemParams& p);

/// Weak-excitation forwards g2; throws DivergentCooperativity at focusing = 1.
std::vector<double> g2_forwards_weak(const SystemParams& p, const std::vector<double>& tau);

/// Delay of the weak-excitation minimum, 4 ln[focusing/(1-focusing)]/gamma.
double g2_forwards_weak_minimum(const SystemParams& p);

/// Forwards g2 beyond weak excitation, through the bad-cavity mapping.
std::vector<double> g2_forwards_badcavity(const SystemParams& p, const std::vector<double>& tau);

/// Sideways g2, identical to free-space resonance fluorescence.
std::vector<double> g2_sideways(const SystemParams& p, const std::vector<double>& tau);
std::vector<double> g2_sideways(double gamma, double Y, const std::vector<double>& tau);

/// Free-space g2 of the Bloch-matrix treatment.
std::vector<double> g2_ss_freespace(const SystemParams& p, const std::vector<double>& tau);

}  // namespace cqed
