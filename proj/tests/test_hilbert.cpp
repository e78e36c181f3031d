#include "doctest.h"

#include "cqed/errors.hpp"
#include "cqed/hilbert.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace cqed;

namespace {

double norm_of(const SparseOp& m) { return Matrix(m).norm(); }

SparseOp commutator(const SparseOp& a, const SparseOp& b) { return SparseOp(a * b - b * a); }

Matrix random_hermitian(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = cplx(n(rng), n(rng));
    return 0.5 * (m + m.adjoint());
}

}  // namespace

TEST_CASE("layout") {
    SpaceLayout l(5);
    CHECK(l.total_dim() == 24);
    CHECK(l.index(0, 0, 0) == 0);
    CHECK(l.index(0, 0, 1) == 1);
    CHECK(l.index(0, 1, 0) == 2);
    CHECK(l.index(1, 0, 0) == 4);
    CHECK(l.index(5, 1, 1) == 23);
    CHECK_THROWS_AS(SpaceLayout(1), InvalidArgument);
}

TEST_CASE("base operators") {
    const SpaceLayout l(6);
    const OperatorSet ops = build_operators(l);
    const StateVector one = basis_state(l, 1);
    CHECK(one.expect(SparseOp(ops.ad * ops.a)) == cplx(1.0, 0.0));
    CHECK(basis_state(l, 4, 1, 0).expect(SparseOp(ops.ad * ops.a)).real() == doctest::Approx(4.0));
    CHECK(norm_of(SparseOp(ops.s1m * ops.s1m)) == 0.0);
    CHECK(norm_of(SparseOp(ops.s2m * ops.s2m)) == 0.0);

    // [a, a+] = 1 away from the top Fock level.
    const Matrix comm = Matrix(commutator(ops.a, ops.ad)) - Matrix::Identity(l.total_dim(), l.total_dim());
    CHECK(comm.topLeftCorner(4 * l.n_fock(), 4 * l.n_fock()).norm() < 1e-13);

    // sigma_z: Hermitian, eigenvalues +-1, ground state at -1.
    CHECK(norm_of(SparseOp(ops.s1z - SparseOp(ops.s1z.adjoint()))) == 0.0);
    CHECK(basis_state(l, 0, 0, 1).expect(ops.s1z) == cplx(-1.0, 0.0));
    CHECK(basis_state(l, 0, 0, 1).expect(ops.s2z) == cplx(1.0, 0.0));
    CHECK(Matrix(ops.s1z * ops.s1z).isApprox(Matrix::Identity(l.total_dim(), l.total_dim())));
    // sigma+ sigma- projects on the excited state.
    CHECK(Matrix(ops.s2p * ops.s2m).isApprox(Matrix(0.5 * (ops.s2z + ops.id))));
}

TEST_CASE("operators on different factors commute") {
    const OperatorSet ops = build_operators(SpaceLayout(4));
    const std::vector<std::vector<SparseOp>> groups = {
        {ops.a, ops.ad}, {ops.s1m, ops.s1p, ops.s1z}, {ops.s2m, ops.s2p, ops.s2z}};
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        for (std::size_t gj = gi + 1; gj < groups.size(); ++gj)
            for (const auto& x : groups[gi])
                for (const auto& y : groups[gj]) CHECK(norm_of(commutator(x, y)) == 0.0);
}

TEST_CASE("operator construction is deterministic") {
    const OperatorSet a = build_operators(SpaceLayout(7));
    const OperatorSet b = build_operators(SpaceLayout(7));
    CHECK(Matrix(a.a) == Matrix(b.a));
    CHECK(Matrix(a.s2z) == Matrix(b.s2z));
    CHECK(a.get(OpLabel::s1p).label == OpLabel::s1p);
    CHECK_THROWS_AS(a.get(OpLabel::composite), InvalidArgument);
}

TEST_CASE("sparse kron matches dense kron") {
    SparseOp x(2, 3);
    x.insert(0, 1) = cplx(1.0, 2.0);
    x.insert(1, 2) = 3.0;
    SparseOp y(2, 2);
    y.insert(1, 0) = cplx(0.0, -1.0);
    y.insert(0, 0) = 2.0;
    const Matrix k = Matrix(kron(x, y));
    const Matrix dx = Matrix(x);
    const Matrix dy = Matrix(y);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 6; ++j) CHECK(k(i, j) == dx(i / 2, j / 2) * dy(i % 2, j % 2));
}

TEST_CASE("field partial trace") {
    const SpaceLayout l(3);
    SUBCASE("product state") {
        std::mt19937_64 rng(3);
        Matrix f = random_hermitian(4, rng);
        f = f * f.adjoint();
        f /= f.trace();
        Eigen::Matrix2cd a1;
        a1 << 0.7, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.3;
        Eigen::Matrix2cd a2;
        a2 << 0.4, 0.0, 0.0, 0.6;
        Matrix full(16, 16);
        for (int n = 0; n < 4; ++n)
            for (int m = 0; m < 4; ++m)
                for (int s = 0; s < 2; ++s)
                    for (int t = 0; t < 2; ++t)
                        for (int u = 0; u < 2; ++u)
                            for (int v = 0; v < 2; ++v)
                                full(l.index(n, s, u), l.index(m, t, v)) = f(n, m) * a1(s, t) * a2(u, v);
        const DensityMatrix rho(l, full);
        CHECK((partial_trace_field(rho) - f).norm() < 1e-15);
        CHECK((partial_trace_atom(rho, 1) - a1).norm() < 1e-15);
        CHECK((partial_trace_atom(rho, 2) - a2).norm() < 1e-15);
    }
    SUBCASE("maximally mixed") {
        const DensityMatrix rho(l, Matrix::Identity(16, 16) / 16.0);
        CHECK((partial_trace_field(rho) - Matrix::Identity(4, 4) / 4.0).norm() < 1e-15);
    }
    SUBCASE("linear and trace preserving on random Hermitian input") {
        std::mt19937_64 rng(11);
        for (int k = 0; k < 100; ++k) {
            const Matrix x = random_hermitian(16, rng);
            const Matrix y = random_hermitian(16, rng);
            const double c = 0.37 * (k + 1);
            const Matrix px = partial_trace_field(DensityMatrix(l, x));
            const Matrix py = partial_trace_field(DensityMatrix(l, y));
            const Matrix pxy = partial_trace_field(DensityMatrix(l, x + c * y));
            CHECK((pxy - px - c * py).norm() < 1e-12);
            CHECK(std::abs(px.trace() - x.trace()) < 1e-12);
            CHECK((px - px.adjoint()).norm() < 1e-12);
        }
    }
    SUBCASE("pure state route agrees") {
        std::mt19937_64 rng(5);
        std::normal_distribution<double> n;
        Vector psi(16);
        for (int i = 0; i < 16; ++i) psi(i) = cplx(n(rng), n(rng));
        psi.normalize();
        const StateVector sv(l, psi);
        CHECK((partial_trace_field(sv) - partial_trace_field(sv.projector())).norm() < 1e-14);
    }
}

TEST_CASE("density matrix validity") {
    const SpaceLayout l(2);
    DensityMatrix good = basis_state(l, 1, 1, 0).projector();
    CHECK_NOTHROW(good.check_valid());
    Matrix bad = good.matrix();
    bad(0, 0) = -0.1;
    bad(1, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix(l, bad).check_valid(), InvalidArgument);
    CHECK_THROWS_AS(DensityMatrix(l, 2.0 * good.matrix()).check_valid(), InvalidArgument);
}

TEST_CASE("truncation check") {
    Matrix f = Matrix::Zero(6, 6);
    f(0, 0) = 1.0 - 2e-6;
    f(5, 5) = 2e-6;
    CHECK(top_fock_population(f) == doctest::Approx(2e-6));
    CHECK_THROWS_AS(check_truncation(f, 1e-6, "test"), TruncationError);
    CHECK_NOTHROW(check_truncation(f, 1e-5, "test"));
}

TEST_CASE("coherent amplitudes") {
    const Vector c = coherent_amplitudes(40, cplx(1.2, -0.5));
    CHECK(c.norm() == doctest::Approx(1.0).epsilon(1e-14));
    const cplx alpha(1.2, -0.5);
    const cplx c3 = std::exp(-0.5 * std::norm(alpha)) * alpha * alpha * alpha / std::sqrt(6.0);
    CHECK(std::abs(c(3) - c3) < 1e-15);
}

TEST_CASE("husimi function") {
    const int n = 30;
    SUBCASE("vacuum") {
        Matrix vac = Matrix::Zero(n + 1, n + 1);
        vac(0, 0) = 1.0;
        const std::vector<cplx> pts = {{0.0, 0.0}, {1.0, 0.5}, {-2.0, 1.0}};
        const HusimiResult q = husimi_q(vac, pts);
        for (std::size_t i = 0; i < pts.size(); ++i)
            CHECK(q.values[i] == doctest::Approx(std::exp(-std::norm(pts[i])) / std::numbers::pi).epsilon(1e-14));
        CHECK_FALSE(q.truncation_warning);
    }
    SUBCASE("coherent state peak and normalization") {
        const cplx beta(1.5, -1.0);
        const Vector c = coherent_amplitudes(n, beta);
        const Matrix rho = c * c.adjoint();
        const auto grid = complex_grid(-5.0, 5.0, 201, -5.0, 5.0, 201);
        const HusimiResult q = husimi_q(rho, grid);
        std::size_t best = 0;
        double total = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (q.values[i] > q.values[best]) best = i;
            total += q.values[i];
        }
        CHECK(std::abs(grid[best] - beta) < 1e-12);
        CHECK(total * 0.05 * 0.05 == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(q.truncation_warning);  // corners reach |alpha|^2 = 50 > n/2
    }
}
