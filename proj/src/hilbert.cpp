#include "cqed/hilbert.hpp"

#include "cqed/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <string>

namespace cqed {

SpaceLayout::SpaceLayout(int n_fock) : n_fock_(n_fock) {
    if (n_fock < 2) throw InvalidArgument("n_fock must be at least 2, got " + std::to_string(n_fock));
}

std::string_view to_string(OpLabel label) {
    switch (label) {
        case OpLabel::a: return "a";
        case OpLabel::ad: return "ad";
        case OpLabel::s1m: return "s1m";
        case OpLabel::s1p: return "s1p";
        case OpLabel::s1z: return "s1z";
        case OpLabel::s2m: return "s2m";
        case OpLabel::s2p: return "s2p";
        case OpLabel::s2z: return "s2z";
        case OpLabel::identity: return "id";
        case OpLabel::composite: return "composite";
    }
    return "composite";
}

QuantumOperator OperatorSet::get(OpLabel label) const {
    switch (label) {
        case OpLabel::a: return {label, a};
        case OpLabel::ad: return {label, ad};
        case OpLabel::s1m: return {label, s1m};
        case OpLabel::s1p: return {label, s1p};
        case OpLabel::s1z: return {label, s1z};
        case OpLabel::s2m: return {label, s2m};
        case OpLabel::s2p: return {label, s2p};
        case OpLabel::s2z: return {label, s2z};
        case OpLabel::identity: return {label, id};
        case OpLabel::composite: break;
    }
    throw InvalidArgument("no base operator for label 'composite'");
}

SparseOp sparse_identity(int dim) {
    SparseOp id(dim, dim);
    id.setIdentity();
    return id;
}

SparseOp kron(const SparseOp& lhs, const SparseOp& rhs) {
    const Eigen::Index rr = rhs.rows();
    const Eigen::Index rc = rhs.cols();
    std::vector<Eigen::Triplet<cplx>> entries;
    entries.reserve(static_cast<std::size_t>(lhs.nonZeros() * rhs.nonZeros()));
    for (int k = 0; k < lhs.outerSize(); ++k) {
        for (SparseOp::InnerIterator li(lhs, k); li; ++li) {
            for (int m = 0; m < rhs.outerSize(); ++m) {
                for (SparseOp::InnerIterator ri(rhs, m); ri; ++ri) {
                    entries.emplace_back(li.row() * rr + ri.row(), li.col() * rc + ri.col(),
                                         li.value() * ri.value());
                }
            }
        }
    }
    SparseOp out(lhs.rows() * rr, lhs.cols() * rc);
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
}

namespace {

SparseOp from_triplets(int dim, const std::vector<Eigen::Triplet<cplx>>& t) {
    SparseOp m(dim, dim);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SparseOp qubit_lowering() { return from_triplets(2, {{0, 1, 1.0}}); }

SparseOp qubit_z() { return from_triplets(2, {{0, 0, -1.0}, {1, 1, 1.0}}); }

SparseOp fock_lowering(int n_fock) {
    std::vector<Eigen::Triplet<cplx>> t;
    for (int n = 1; n <= n_fock; ++n) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
    return from_triplets(n_fock + 1, t);
}

SparseOp embed(const SparseOp& field, const SparseOp& atom1, const SparseOp& atom2) {
    return kron(kron(field, atom1), atom2);
}

}  // namespace

OperatorSet build_operators(const SpaceLayout& layout) {
    const SparseOp idf = sparse_identity(layout.fock_dim());
    const SparseOp idq = sparse_identity(2);
    const SparseOp sm = qubit_lowering();
    const SparseOp sp = SparseOp(sm.adjoint());
    const SparseOp sz = qubit_z();
    const SparseOp af = fock_lowering(layout.n_fock());

    OperatorSet ops;
    ops.a = embed(af, idq, idq);
    ops.ad = SparseOp(ops.a.adjoint());
    ops.s1m = embed(idf, sm, idq);
    ops.s1p = embed(idf, sp, idq);
    ops.s1z = embed(idf, sz, idq);
    ops.s2m = embed(idf, idq, sm);
    ops.s2p = embed(idf, idq, sp);
    ops.s2z = embed(idf, idq, sz);
    ops.id = sparse_identity(layout.total_dim());
    return ops;
}

DensityMatrix::DensityMatrix(SpaceLayout layout, Matrix rho) : layout_(layout), rho_(std::move(rho)) {
    if (rho_.rows() != layout_.total_dim() || rho_.cols() != layout_.total_dim()) {
        throw InvalidArgument("density matrix dimension does not match layout");
    }
}

cplx DensityMatrix::expect(const SparseOp& op) const {
    // tr(op rho) = sum_ij op_ij rho_ji
    cplx sum{0.0, 0.0};
    for (int k = 0; k < op.outerSize(); ++k) {
        for (SparseOp::InnerIterator it(op, k); it; ++it) sum += it.value() * rho_(it.col(), it.row());
    }
    return sum;
}

double DensityMatrix::min_eigenvalue() const {
    const Matrix herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void DensityMatrix::check_valid(double trace_tol, double positivity_tol) const {
    if (std::abs(rho_.trace() - cplx(1.0, 0.0)) > trace_tol) {
        throw InvalidArgument("density matrix trace deviates from 1 by " +
                              std::to_string(std::abs(rho_.trace() - 1.0)));
    }
    if (hermiticity_defect() > trace_tol) throw InvalidArgument("density matrix is not Hermitian");
    if (min_eigenvalue() < -positivity_tol) throw InvalidArgument("density matrix is not positive");
}

StateVector::StateVector(SpaceLayout layout, Vector psi) : layout_(layout), psi_(std::move(psi)) {
    if (psi_.size() != layout_.total_dim()) throw InvalidArgument("state dimension does not match layout");
}

cplx StateVector::expect(const SparseOp& op) const { return psi_.dot(op * psi_); }

DensityMatrix StateVector::projector() const { return {layout_, psi_ * psi_.adjoint()}; }

StateVector basis_state(const SpaceLayout& layout, int n, int s1, int s2) {
    if (n < 0 || n > layout.n_fock() || s1 < 0 || s1 > 1 || s2 < 0 || s2 > 1) {
        throw InvalidArgument("basis state label out of range");
    }
    Vector psi = Vector::Zero(layout.total_dim());
    psi(layout.index(n, s1, s2)) = 1.0;
    return {layout, psi};
}

Vector coherent_amplitudes(int n_fock, cplx alpha) {
    Vector c(n_fock + 1);
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n <= n_fock; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    return c;
}

Matrix partial_trace_field(const DensityMatrix& rho) {
    const SpaceLayout& l = rho.layout();
    const Matrix& m = rho.matrix();
    Matrix out = Matrix::Zero(l.fock_dim(), l.fock_dim());
    for (int n = 0; n < l.fock_dim(); ++n) {
        for (int k = 0; k < l.fock_dim(); ++k) {
            cplx sum{0.0, 0.0};
            for (int s = 0; s < 4; ++s) sum += m(4 * n + s, 4 * k + s);
            out(n, k) = sum;
        }
    }
    return out;
}

Matrix partial_trace_field(const StateVector& psi) {
    const SpaceLayout& l = psi.layout();
    // Rows: Fock index, columns: joint atom index.
    const Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> block(
        psi.vector().data(), l.fock_dim(), 4);
    return block * block.adjoint();
}

Eigen::Matrix2cd partial_trace_atom(const DensityMatrix& rho, int which) {
    if (which != 1 && which != 2) throw InvalidArgument("atom index must be 1 or 2");
    const SpaceLayout& l = rho.layout();
    const Matrix& m = rho.matrix();
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (int n = 0; n < l.fock_dim(); ++n) {
        for (int other = 0; other < 2; ++other) {
            for (int s = 0; s < 2; ++s) {
                for (int t = 0; t < 2; ++t) {
                    const int i = which == 1 ? l.index(n, s, other) : l.index(n, other, s);
                    const int j = which == 1 ? l.index(n, t, other) : l.index(n, other, t);
                    out(s, t) += m(i, j);
                }
            }
        }
    }
    return out;
}

double top_fock_population(const Matrix& rho_field, int levels) {
    const int dim = static_cast<int>(rho_field.rows());
    double p = 0.0;
    for (int n = std::max(0, dim - levels); n < dim; ++n) p += rho_field(n, n).real();
    return p;
}

void check_truncation(const Matrix& rho_field, double tolerance, std::string_view context) {
    const double p = top_fock_population(rho_field, 2);
    if (p > tolerance) {
        throw TruncationError(std::string(context) + ": population " + std::to_string(p) +
                              " in the top two Fock levels exceeds " + std::to_string(tolerance) +
                              " (n_fock = " + std::to_string(rho_field.rows() - 1) + ")");
    }
}

HusimiResult husimi_q(const Matrix& rho_field, std::span<const cplx> grid) {
    const int n_fock = static_cast<int>(rho_field.rows()) - 1;
    HusimiResult result;
    result.values.reserve(grid.size());
    for (const cplx& alpha : grid) {
        if (std::norm(alpha) > 0.5 * n_fock) result.truncation_warning = true;
        const Vector c = coherent_amplitudes(n_fock, alpha);
        const double q = c.dot(rho_field * c).real() / std::numbers::pi;
        result.values.push_back(std::max(q, 0.0));
    }
    return result;
}

std::vector<cplx> complex_grid(double x0, double x1, int nx, double y0, double y1, int ny) {
    if (nx < 2 || ny < 2) throw InvalidArgument("grid needs at least two points per axis");
    std::vector<cplx> g;
    g.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        const double y = y0 + (y1 - y0) * j / (ny - 1);
        for (int i = 0; i < nx; ++i) g.emplace_back(x0 + (x1 - x0) * i / (nx - 1), y);
    }
    return g;
}

}  // namespace cqed
