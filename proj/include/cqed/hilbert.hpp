#pragma once

#include "cqed/params.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <span>
#include <string_view>
#include <vector>

namespace cqed {

using SparseOp = Eigen::SparseMatrix<cplx>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Cavity Fock space truncated at `n_fock` photons, tensored with the internal
/// and the external qubit, always in the order (cavity, atom1, atom2).
/// Qubit basis: index 0 is the ground state, index 1 the excited state.
class SpaceLayout {
public:
    explicit SpaceLayout(int n_fock);

    int n_fock() const { return n_fock_; }
    int fock_dim() const { return n_fock_ + 1; }
    int total_dim() const { return 4 * (n_fock_ + 1); }

    /// Basis index of |n> |s1> |s2>.
    int index(int n, int s1, int s2) const { return (n * 2 + s1) * 2 + s2; }

    bool operator==(const SpaceLayout&) const = default;

private:
    int n_fock_;
};

enum class OpLabel { a, ad, s1m, s1p, s1z, s2m, s2p, s2z, identity, composite };

std::string_view to_string(OpLabel label);

struct QuantumOperator {
    OpLabel label = OpLabel::composite;
    SparseOp matrix;
};

/// The nine base operators on the composite space.
struct OperatorSet {
    SparseOp a, ad, s1m, s1p, s1z, s2m, s2p, s2z, id;

    QuantumOperator get(OpLabel label) const;
};

OperatorSet build_operators(const SpaceLayout& layout);

/// Kronecker product of sparse matrices (left factor is the slow index).
SparseOp kron(const SparseOp& lhs, const SparseOp& rhs);

SparseOp sparse_identity(int dim);

class DensityMatrix {
public:
    DensityMatrix(SpaceLayout layout, Matrix rho);

    const SpaceLayout& layout() const { return layout_; }
    const Matrix& matrix() const { return rho_; }
    Matrix& matrix() { return rho_; }

    cplx expect(const SparseOp& op) const;
    double trace_real() const { return rho_.trace().real(); }
    double hermiticity_defect() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }
    double min_eigenvalue() const;

    /// Throws InvalidArgument when trace, Hermiticity or positivity are off by
    /// more than the given tolerances.
    void check_valid(double trace_tol = 1e-10, double positivity_tol = 1e-8) const;

private:
    SpaceLayout layout_;
    Matrix rho_;
};

class StateVector {
public:
    StateVector(SpaceLayout layout, Vector psi);

    const SpaceLayout& layout() const { return layout_; }
    const Vector& vector() const { return psi_; }
    Vector& vector() { return psi_; }

    cplx expect(const SparseOp& op) const;
    void normalize() { psi_.normalize(); }
    DensityMatrix projector() const;

private:
    SpaceLayout layout_;
    Vector psi_;
};

/// |n> |s1> |s2> product basis state.
StateVector basis_state(const SpaceLayout& layout, int n, int s1 = 0, int s2 = 0);

/// Coherent state amplitudes <n|alpha> on a truncated Fock space (not
/// renormalized, so the truncation loss is visible in the norm).
Vector coherent_amplitudes(int n_fock, cplx alpha);

/// Reduced density matrix of the cavity mode.
Matrix partial_trace_field(const DensityMatrix& rho);
Matrix partial_trace_field(const StateVector& psi);

/// Reduced density matrices of the internal (1) or external (2) atom.
Eigen::Matrix2cd partial_trace_atom(const DensityMatrix& rho, int which);

/// Population in the top `levels` Fock states.
double top_fock_population(const Matrix& rho_field, int levels = 2);

/// Throws TruncationError when top_fock_population exceeds `tolerance`.
void check_truncation(const Matrix& rho_field, double tolerance, std::string_view context);

struct HusimiResult {
    std::vector<double> values;       // Q at each grid point
    bool truncation_warning = false;  // some |alpha|^2 > 0.5 n_fock
};

/// Q(alpha) = <alpha| rho |alpha> / pi on the given points.
HusimiResult husimi_q(const Matrix& rho_field, std::span<const cplx> grid);

/// Regular grid helper: nx by ny points covering [x0,x1] x [y0,y1], x fastest.
std::vector<cplx> complex_grid(double x0, double x1, int nx, double y0, double y1, int ny);

}  // namespace cqed
