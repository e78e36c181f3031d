#pragma once

#include "cqed/hilbert.hpp"
#include "cqed/params.hpp"
#include "cqed/series.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace cqed {

/// Column-stacking vectorization: vec(A rho B) = (B^T kron A) vec(rho).
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, int dim);

/// C1 (forwards), C2 (sideways from the external atom) and, when gamma_s > 0,
/// C3 (sideways from the internal atom).
std::vector<SparseOp> collapse_operators(const SystemParams& p, const OperatorSet& ops);
SparseOp forwards_operator(const SystemParams& p, const OperatorSet& ops);
SparseOp sideways_operator(const SystemParams& p, const OperatorSet& ops);

/// Interaction-picture Hamiltonian of the cascaded system (hbar = 1).
SparseOp hamiltonian(const SystemParams& p, const OperatorSet& ops);

/// Superoperator -i[H, .] + sum_k D[C_k] on vec(rho).
SparseOp superoperator(const SparseOp& H, const std::vector<SparseOp>& collapse);

class Liouvillian {
public:
    Liouvillian(SystemParams p, SpaceLayout layout);

    const SystemParams& params() const { return params_; }
    const SpaceLayout& layout() const { return layout_; }
    const OperatorSet& ops() const { return ops_; }
    const SparseOp& hamiltonian() const { return H_; }
    const std::vector<SparseOp>& collapse() const { return collapse_; }
    const SparseOp& matrix() const { return L_; }
    int dim() const { return layout_.total_dim(); }

    Matrix apply(const Matrix& rho) const;

    /// Norm of the identity left vector times L; zero for a trace-preserving generator.
    double trace_defect() const;

    /// Isometry onto the states with every inert atom (decoupled and undamped)
    /// in its ground state, and L restricted to that invariant sector.
    const SparseOp& active_selector() const { return P_; }
    const SparseOp& active_matrix() const { return Lr_; }
    int active_dim() const { return static_cast<int>(P_.cols()); }

private:
    SystemParams params_;
    SpaceLayout layout_;
    OperatorSet ops_;
    SparseOp H_;
    std::vector<SparseOp> collapse_;
    SparseOp L_;
    SparseOp P_;
    SparseOp Lr_;
};

Liouvillian build_liouvillian(const SystemParams& p, const SpaceLayout& layout);

struct SteadyStateOptions {
    double truncation_tol = 1e-6;  // top-two Fock populations; <= 0 disables the check
};

/// Stationary state from L vec(rho) = 0 with one row replaced by tr(rho) = 1.
/// Atoms that are decoupled and undamped are placed in their ground state.
DensityMatrix steady_state(const Liouvillian& L, const SteadyStateOptions& opts = {});

/// ||L vec(rho)|| / ||L||, both Frobenius.
double stationarity_residual(const Liouvillian& L, const DensityMatrix& rho);

struct PropagationOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;  // relative to max |x0|
};

using PropagationSink = std::function<void(std::size_t, const Vector&)>;

/// Integrates dx/dt = L x from x(0) = x0 and hands the state at each of the
/// ascending, non-negative `times` to `sink`. Throws StiffnessFailure when the
/// step size collapses below 1e-12 of the time span.
void propagate(const SparseOp& L, const Vector& x0, const std::vector<double>& times,
               const PropagationSink& sink, const PropagationOptions& opts = {});

std::vector<DensityMatrix> evolve(const Liouvillian& L, const DensityMatrix& rho0,
                                  const std::vector<double>& times,
                                  const PropagationOptions& opts = {});

/// Dense eigen-expansion of L, for small spaces only (total_dim <= 40).
class EigenPropagator {
public:
    explicit EigenPropagator(const Liouvillian& L);

    Vector apply(const Vector& x0, double t) const;

private:
    Vector lambda_;
    Matrix V_;
    Eigen::PartialPivLU<Matrix> lu_;
};

/// tr{B_k e^{L tau}[X0]} for several B_k sharing one propagation.
std::vector<std::vector<cplx>> regress(const Liouvillian& L, const Matrix& X0,
                                       const std::vector<SparseOp>& B,
                                       const std::vector<double>& tau,
                                       const PropagationOptions& opts = {});

/// Quantum regression. Second-order kinds return tr{B e^{L tau}[A rho A+]};
/// every other kind returns tr{B e^{L tau}[rho A]} = <A(0) B(tau)>.
CorrelationSeries regression_correlator(const Liouvillian& L, const DensityMatrix& rho,
                                        const SparseOp& A, const SparseOp& B,
                                        const std::vector<double>& tau,
                                        CorrelationKind kind = CorrelationKind::generic,
                                        const PropagationOptions& opts = {});

/// <dA(0) dB(tau)> with dX = X - <X>.
CorrelationSeries fluctuation_correlator(const Liouvillian& L, const DensityMatrix& rho,
                                         const SparseOp& A, const SparseOp& B,
                                         const std::vector<double>& tau,
                                         CorrelationKind kind = CorrelationKind::generic,
                                         const PropagationOptions& opts = {});

/// Normalized intensity correlation of the output channel C.
std::vector<double> numeric_g2(const Liouvillian& L, const DensityMatrix& rho, const SparseOp& C,
                               const std::vector<double>& tau, const PropagationOptions& opts = {});

/// (1/pi) Re int_0^inf e^{i (w - w_A) s} C(s) ds / mean_flux by the trapezoid rule,
/// with s = tau_scale * tau (tau_scale = gamma/2 gives the w-bar axis).
/// `mean_flux` defaults to Re C(0). Throws UnconvergedTail unless
/// |C(end)| < 1e-6 |C(0)|.
Spectrum numeric_incoherent_spectrum(const CorrelationSeries& series, double tau_scale,
                                     const std::vector<double>& omega,
                                     std::optional<double> mean_flux = std::nullopt,
                                     double omega_A = 0.0);

/// <dC1+(0) dC1(tau)> and <dC1+(0) dC1+(tau)> of the forwards output.
struct ForwardsCorrelators {
    CorrelationSeries pm;
    CorrelationSeries pp;
    double flux = 0.0;  // <dC1+ dC1>
};

ForwardsCorrelators forwards_correlators(const Liouvillian& L, const DensityMatrix& rho,
                                         const std::vector<double>& tau,
                                         const PropagationOptions& opts = {});

/// (8 eta/pi) int_0^inf cos(w s) Re(pm + e^{2 i theta} pp) ds on the w-bar axis;
/// `normalized` divides by 16 eta <dC1+ dC1>.
Spectrum squeezing_from_correlators(const ForwardsCorrelators& c, double tau_scale, double eta,
                                    double theta, const std::vector<double>& omega,
                                    bool normalized = false);

Spectrum numeric_squeezing_spectrum(const Liouvillian& L, const DensityMatrix& rho, double theta,
                                    const std::vector<double>& omega,
                                    const std::vector<double>& tau, bool normalized = false,
                                    const PropagationOptions& opts = {});

/// tr{C1+ C1 rho}.
double forwards_flux(const DensityMatrix& rho, const SystemParams& p);

}  // namespace cqed
