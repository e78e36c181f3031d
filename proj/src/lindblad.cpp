#include "cqed/lindblad.hpp"

#include "cqed/errors.hpp"
#include "dense_output.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <cmath>
#include <numbers>

namespace cqed {

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, int dim) {
    if (v.size() != static_cast<Eigen::Index>(dim) * dim) throw InvalidArgument("unvec: size mismatch");
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

SparseOp forwards_operator(const SystemParams& p, const OperatorSet& ops) {
    return SparseOp(std::sqrt(2.0 * p.kappa) * ops.a + std::sqrt(p.focusing * p.gamma / 2.0) * ops.s2m);
}

SparseOp sideways_operator(const SystemParams& p, const OperatorSet& ops) {
    return SparseOp(std::sqrt((2.0 - p.focusing) * p.gamma / 2.0) * ops.s2m);
}

std::vector<SparseOp> collapse_operators(const SystemParams& p, const OperatorSet& ops) {
    std::vector<SparseOp> c{forwards_operator(p, ops), sideways_operator(p, ops)};
    if (p.gamma_s > 0.0) c.push_back(SparseOp(std::sqrt(p.gamma_s) * ops.s1m));
    return c;
}

SparseOp hamiltonian(const SystemParams& p, const OperatorSet& ops) {
    // H = i K with K = g (a+ s1- - a s1+) + sqrt(focusing kappa gamma / 4) (a+ s2- - a s2+)
    //                 + eps_d (a+ - a)
    const double g2 = std::sqrt(p.focusing * p.kappa * p.gamma / 4.0);
    const SparseOp K = p.g * (ops.ad * ops.s1m - ops.a * ops.s1p) +
                       g2 * (ops.ad * ops.s2m - ops.a * ops.s2p) + p.eps_d * (ops.ad - ops.a);
    return SparseOp(cplx(0.0, 1.0) * K);
}

SparseOp superoperator(const SparseOp& H, const std::vector<SparseOp>& collapse) {
    const int d = static_cast<int>(H.rows());
    const SparseOp id = sparse_identity(d);
    const cplx mi(0.0, -1.0);
    SparseOp L = mi * (kron(id, H) - kron(SparseOp(H.transpose()), id));
    for (const SparseOp& c : collapse) {
        if (c.nonZeros() == 0) continue;
        const SparseOp cdc = SparseOp(c.adjoint()) * c;
        L += kron(SparseOp(c.conjugate()), c) - 0.5 * kron(id, cdc) -
             0.5 * kron(SparseOp(cdc.transpose()), id);
    }
    L.prune(cplx(0.0, 0.0));
    return L;
}

namespace {

// Selects the basis states in which every inert atom sits in its ground state.
SparseOp ground_sector(const SystemParams& p, const SpaceLayout& layout) {
    const bool a1 = p.internal_atom_active();
    const bool a2 = p.external_atom_active();
    std::vector<Eigen::Triplet<cplx>> t;
    int col = 0;
    for (int n = 0; n < layout.fock_dim(); ++n)
        for (int s1 = 0; s1 < (a1 ? 2 : 1); ++s1)
            for (int s2 = 0; s2 < (a2 ? 2 : 1); ++s2) t.emplace_back(layout.index(n, s1, s2), col++, 1.0);
    SparseOp P(layout.total_dim(), col);
    P.setFromTriplets(t.begin(), t.end());
    return P;
}

SparseOp restrict_op(const SparseOp& P, const SparseOp& op) {
    return SparseOp(SparseOp(P.transpose()) * op * P);
}

}  // namespace

Liouvillian::Liouvillian(SystemParams p, SpaceLayout layout)
    : params_(p), layout_(layout), ops_(build_operators(layout)) {
    params_.validate();
    H_ = cqed::hamiltonian(params_, ops_);
    collapse_ = collapse_operators(params_, ops_);
    L_ = superoperator(H_, collapse_);

    P_ = ground_sector(params_, layout_);
    OperatorSet r;
    r.a = restrict_op(P_, ops_.a);
    r.ad = restrict_op(P_, ops_.ad);
    r.s1m = restrict_op(P_, ops_.s1m);
    r.s1p = restrict_op(P_, ops_.s1p);
    r.s2m = restrict_op(P_, ops_.s2m);
    r.s2p = restrict_op(P_, ops_.s2p);
    Lr_ = superoperator(cqed::hamiltonian(params_, r), collapse_operators(params_, r));
}

Matrix Liouvillian::apply(const Matrix& rho) const { return unvec(L_ * vec(rho), dim()); }

double Liouvillian::trace_defect() const {
    const Vector t = vec(Matrix::Identity(dim(), dim()));
    return (L_.transpose() * t).norm();
}

Liouvillian build_liouvillian(const SystemParams& p, const SpaceLayout& layout) {
    return Liouvillian(p, layout);
}


DensityMatrix steady_state(const Liouvillian& L, const SteadyStateOptions& opts) {
    const SparseOp& P = L.active_selector();
    const SparseOp& Lr = L.active_matrix();
    const int d = L.active_dim();

    // Row 0 (the equation for rho_00) becomes the trace constraint.
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(static_cast<std::size_t>(Lr.nonZeros() + d));
    for (int k = 0; k < Lr.outerSize(); ++k)
        for (SparseOp::InnerIterator it(Lr, k); it; ++it)
            if (it.row() != 0) t.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < d; ++i) t.emplace_back(0, i + i * d, 1.0);
    SparseOp M(d * d, d * d);
    M.setFromTriplets(t.begin(), t.end());
    M.makeCompressed();

    Eigen::SparseLU<SparseOp> lu;
    lu.compute(M);
    if (lu.info() != Eigen::Success) throw SingularSolve("steady state: " + lu.lastErrorMessage());
    Vector b = Vector::Zero(d * d);
    b(0) = 1.0;
    const Vector x = lu.solve(b);
    if (lu.info() != Eigen::Success || !x.allFinite()) throw SingularSolve("steady state: solve failed");
    const double res = (M * x - b).norm();
    if (res > 1e-8 * (1.0 + x.norm())) {
        throw SingularSolve("steady state: constrained system is rank deficient (residual " +
                            std::to_string(res) + ")");
    }

    Matrix rr = unvec(x, d);
    rr = 0.5 * (rr + rr.adjoint());
    rr /= rr.trace().real();
    const Matrix Pd = Matrix(P);
    DensityMatrix rho(L.layout(), Pd * rr * Pd.transpose());
    if (opts.truncation_tol > 0.0) {
        check_truncation(partial_trace_field(rho), opts.truncation_tol, "steady state");
    }
    return rho;
}

double stationarity_residual(const Liouvillian& L, const DensityMatrix& rho) {
    return (L.matrix() * vec(rho.matrix())).norm() / L.matrix().norm();
}

void propagate(const SparseOp& L, const Vector& x0, const std::vector<double>& times,
               const PropagationSink& sink, const PropagationOptions& opts) {
    // Complex state stored as interleaved (re, im) pairs of a real vector.
    const Eigen::Index n = x0.size();
    Eigen::VectorXd x(2 * n);
    Eigen::Map<Vector>(reinterpret_cast<cplx*>(x.data()), n) = x0;
    const auto rhs = [&L, n](const Eigen::VectorXd& s, Eigen::VectorXd& ds, double) {
        Eigen::Map<const Vector> sc(reinterpret_cast<const cplx*>(s.data()), n);
        Eigen::Map<Vector> dc(reinterpret_cast<cplx*>(ds.data()), n);
        dc.noalias() = L * sc;
    };
    Vector xc(n);
    const auto report = [&](std::size_t k, const Eigen::VectorXd& s) {
        xc = Eigen::Map<const Vector>(reinterpret_cast<const cplx*>(s.data()), n);
        sink(k, xc);
    };
    const double scale = std::max(x0.cwiseAbs().maxCoeff(), 1e-300);
    detail::integrate_dense(rhs, x, times, opts.abs_tol * scale, opts.rel_tol, report, "propagate");
}

std::vector<DensityMatrix> evolve(const Liouvillian& L, const DensityMatrix& rho0,
                                  const std::vector<double>& times, const PropagationOptions& opts) {
    std::vector<DensityMatrix> out;
    out.reserve(times.size());
    propagate(L.matrix(), vec(rho0.matrix()), times,
              [&](std::size_t, const Vector& x) { out.emplace_back(L.layout(), unvec(x, L.dim())); },
              opts);
    return out;
}

EigenPropagator::EigenPropagator(const Liouvillian& L) {
    if (L.dim() > 40) throw InvalidArgument("eigen expansion is limited to total_dim <= 40");
    Eigen::ComplexEigenSolver<Matrix> es(Matrix(L.matrix()));
    if (es.info() != Eigen::Success) throw SingularSolve("eigen expansion: eigensolver failed");
    lambda_ = es.eigenvalues();
    V_ = es.eigenvectors();
    lu_.compute(V_);
}

Vector EigenPropagator::apply(const Vector& x0, double t) const {
    const Vector c = lu_.solve(x0);
    return V_ * (lambda_.array() * t).exp().matrix().cwiseProduct(c);
}

std::vector<std::vector<cplx>> regress(const Liouvillian& L, const Matrix& X0,
                                       const std::vector<SparseOp>& B, const std::vector<double>& tau,
                                       const PropagationOptions& opts) {
    // Inert atoms never leave the ground-state sector, so an initial operator
    // supported there is propagated on the smaller space.
    const Matrix P = Matrix(L.active_selector());
    Matrix Xr = P.adjoint() * X0 * P;
    const bool reduce = L.active_dim() < L.dim() && (P * Xr * P.adjoint() - X0).norm() <= 1e-14 * X0.norm();
    if (!reduce) Xr = X0;

    // tr(B X) = vec(B^T) . vec(X) without conjugation
    std::vector<Vector> bt;
    bt.reserve(B.size());
    for (const SparseOp& b : B) {
        const Matrix bm = reduce ? Matrix(P.adjoint() * b * P) : Matrix(b);
        bt.push_back(vec(Matrix(bm.transpose())));
    }
    std::vector<std::vector<cplx>> out(B.size(), std::vector<cplx>(tau.size()));
    propagate(
        reduce ? L.active_matrix() : L.matrix(), vec(Xr), tau,
        [&](std::size_t k, const Vector& x) {
            for (std::size_t j = 0; j < bt.size(); ++j) out[j][k] = (bt[j].array() * x.array()).sum();
        },
        opts);
    return out;
}

namespace {

bool second_order(CorrelationKind kind) {
    return kind == CorrelationKind::second_order_C1 || kind == CorrelationKind::second_order_C2;
}

}  // namespace

CorrelationSeries regression_correlator(const Liouvillian& L, const DensityMatrix& rho, const SparseOp& A,
                                        const SparseOp& B, const std::vector<double>& tau,
                                        CorrelationKind kind, const PropagationOptions& opts) {
    const Matrix& r = rho.matrix();
    const Matrix X0 = second_order(kind) ? Matrix(A * r * A.adjoint()) : Matrix(r * A);
    CorrelationSeries s;
    s.tau = tau;
    s.kind = kind;
    s.values = std::move(regress(L, X0, {B}, tau, opts).front());
    return s;
}

CorrelationSeries fluctuation_correlator(const Liouvillian& L, const DensityMatrix& rho, const SparseOp& A,
                                         const SparseOp& B, const std::vector<double>& tau,
                                         CorrelationKind kind, const PropagationOptions& opts) {
    const SparseOp& id = L.ops().id;
    const SparseOp dA = A - rho.expect(A) * id;
    const SparseOp dB = B - rho.expect(B) * id;
    CorrelationSeries s;
    s.tau = tau;
    s.kind = kind;
    s.values = std::move(regress(L, Matrix(rho.matrix() * dA), {dB}, tau, opts).front());
    return s;
}

std::vector<double> numeric_g2(const Liouvillian& L, const DensityMatrix& rho, const SparseOp& C,
                               const std::vector<double>& tau, const PropagationOptions& opts) {
    const SparseOp n = SparseOp(C.adjoint()) * C;
    const double mean = rho.expect(n).real();
    if (!(mean > 0.0)) throw InvalidArgument("numeric_g2: channel carries no flux");
    const CorrelationSeries s =
        regression_correlator(L, rho, C, n, tau, CorrelationKind::second_order_C1, opts);
    std::vector<double> g2(tau.size());
    for (std::size_t k = 0; k < tau.size(); ++k) g2[k] = s.values[k].real() / (mean * mean);
    return g2;
}

namespace {

std::vector<double> trapezoid_weights(const std::vector<double>& s) {
    const std::size_t n = s.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double h = 0.5 * (s[k + 1] - s[k]);
        w[k] += h;
        w[k + 1] += h;
    }
    return w;
}

void check_grid(const std::vector<double>& tau, std::size_t values) {
    if (tau.size() < 2 || tau.size() != values) throw InvalidArgument("correlation series: bad grid");
    for (std::size_t k = 1; k < tau.size(); ++k)
        if (!(tau[k] > tau[k - 1])) throw InvalidArgument("correlation series: grid not increasing");
}

void check_tail(double end, double start, const char* what) {
    if (!(end < 1e-6 * start)) {
        throw UnconvergedTail(std::string(what) + ": correlator tail " + std::to_string(end) +
                              " exceeds 1e-6 of its initial value " + std::to_string(start));
    }
}

}  // namespace

Spectrum numeric_incoherent_spectrum(const CorrelationSeries& series, double tau_scale,
                                     const std::vector<double>& omega, std::optional<double> mean_flux,
                                     double omega_A) {
    check_grid(series.tau, series.values.size());
    check_tail(std::abs(series.values.back()), std::abs(series.values.front()), "incoherent spectrum");
    const double flux = mean_flux.value_or(series.values.front().real());
    if (!(flux > 0.0)) throw InvalidArgument("incoherent spectrum: non-positive mean flux");

    std::vector<double> s(series.tau.size());
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = tau_scale * series.tau[k];
    const std::vector<double> w = trapezoid_weights(s);

    Spectrum out;
    out.omega = omega;
    out.norm = SpectrumNorm::unit_area;
    out.values.resize(omega.size());
    for (std::size_t j = 0; j < omega.size(); ++j) {
        const double dw = omega[j] - omega_A;
        cplx sum{0.0, 0.0};
        for (std::size_t k = 0; k < s.size(); ++k) sum += w[k] * std::polar(1.0, dw * s[k]) * series.values[k];
        out.values[j] = sum.real() / (std::numbers::pi * flux);
    }
    return out;
}

ForwardsCorrelators forwards_correlators(const Liouvillian& L, const DensityMatrix& rho,
                                         const std::vector<double>& tau, const PropagationOptions& opts) {
    const SparseOp c1 = forwards_operator(L.params(), L.ops());
    const SparseOp dc = c1 - rho.expect(c1) * L.ops().id;
    const SparseOp dcd = SparseOp(dc.adjoint());
    auto v = regress(L, Matrix(rho.matrix() * dcd), {dc, dcd}, tau, opts);
    ForwardsCorrelators c;
    c.pm = {tau, std::move(v[0]), CorrelationKind::first_order_pm};
    c.pp = {tau, std::move(v[1]), CorrelationKind::first_order_pp};
    c.flux = c.pm.values.front().real();
    return c;
}

Spectrum squeezing_from_correlators(const ForwardsCorrelators& c, double tau_scale, double eta,
                                    double theta, const std::vector<double>& omega, bool normalized) {
    check_grid(c.pm.tau, c.pm.values.size());
    check_grid(c.pp.tau, c.pp.values.size());
    const double start = std::abs(c.pm.values.front());
    check_tail(std::max(std::abs(c.pm.values.back()), std::abs(c.pp.values.back())), start,
               "squeezing spectrum");

    std::vector<double> s(c.pm.tau.size());
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = tau_scale * c.pm.tau[k];
    const std::vector<double> w = trapezoid_weights(s);
    const cplx phase = std::polar(1.0, 2.0 * theta);
    std::vector<double> f(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) f[k] = w[k] * (c.pm.values[k] + phase * c.pp.values[k]).real();

    Spectrum out;
    out.omega = omega;
    out.norm = normalized ? SpectrumNorm::normalized : SpectrumNorm::raw;
    out.values.resize(omega.size());
    const double pre = 8.0 * eta / std::numbers::pi / (normalized ? 16.0 * eta * c.flux : 1.0);
    for (std::size_t j = 0; j < omega.size(); ++j) {
        double sum = 0.0;
        for (std::size_t k = 0; k < s.size(); ++k) sum += std::cos(omega[j] * s[k]) * f[k];
        out.values[j] = pre * sum;
    }
    return out;
}

Spectrum numeric_squeezing_spectrum(const Liouvillian& L, const DensityMatrix& rho, double theta,
                                    const std::vector<double>& omega, const std::vector<double>& tau,
                                    bool normalized, const PropagationOptions& opts) {
    const SystemParams& p = L.params();
    if (!(p.gamma > 0.0)) throw InvalidArgument("squeezing spectrum needs gamma > 0");
    return squeezing_from_correlators(forwards_correlators(L, rho, tau, opts), p.gamma / 2.0, p.eta, theta,
                                      omega, normalized);
}

double forwards_flux(const DensityMatrix& rho, const SystemParams& p) {
    const SparseOp c1 = forwards_operator(p, build_operators(rho.layout()));
    return rho.expect(SparseOp(SparseOp(c1.adjoint()) * c1)).real();
}

}  // namespace cqed
