#include "doctest.h"

#include "cqed/errors.hpp"
#include "cqed/lindblad.hpp"
#include "cqed/resfluor.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace cqed;

namespace {

// g = 0 with Y set through eps_d.
SystemParams empty_cavity(double gamma, double kappa, double focusing, double Y) {
    SystemParams p;
    p.kappa = kappa;
    p.gamma = gamma;
    p.focusing = focusing;
    p.eps_d = Y * kappa / (2.0 * std::sqrt(2.0 * kappa * focusing / gamma));
    return p;
}

Matrix random_hermitian(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = cplx(n(rng), n(rng));
    return 0.5 * (m + m.adjoint());
}

}  // namespace

TEST_CASE("liouvillian preserves trace and hermiticity") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int k = 0; k < 10; ++k) {
        SystemParams p;
        p.g = u(rng);
        p.kappa = 0.1 + u(rng);
        p.gamma = u(rng);
        p.gamma_s = (k % 2) ? u(rng) : 0.0;
        p.eps_d = u(rng);
        p.focusing = 0.5 * u(rng);
        const Liouvillian L(p, SpaceLayout(4));
        CHECK(L.trace_defect() < 1e-10);
        const Matrix x = random_hermitian(L.dim(), rng);
        const Matrix y = L.apply(x);
        CHECK((y - y.adjoint()).norm() < 1e-12 * (1.0 + y.norm()));
        CHECK(std::abs(y.trace()) < 1e-12 * (1.0 + y.norm()));
    }
}

TEST_CASE("emission bookkeeping of the external atom") {
    SystemParams p;
    p.gamma = 0.8;
    p.focusing = 0.3;
    const OperatorSet ops = build_operators(SpaceLayout(2));
    const auto c = collapse_operators(p, ops);
    REQUIRE(c.size() == 2);
    // Both channels act on s2- only here; their total rate is gamma.
    const StateVector e = basis_state(SpaceLayout(2), 0, 0, 1);
    double total = 0.0;
    for (const SparseOp& ck : c) total += e.expect(SparseOp(SparseOp(ck.adjoint()) * ck)).real();
    CHECK(total == doctest::Approx(0.8).epsilon(1e-14));
    p.gamma_s = 0.1;
    CHECK(collapse_operators(p, ops).size() == 3);
}

TEST_CASE("damped driven cavity relaxes to a coherent state") {
    SystemParams p;
    p.kappa = 1.3;
    p.eps_d = 0.9;
    const Liouvillian L(p, SpaceLayout(20));
    const DensityMatrix rho = steady_state(L);
    CHECK(std::abs(rho.expect(L.ops().a) - cplx(0.9 / 1.3, 0.0)) < 1e-10);
    const Matrix f = partial_trace_field(rho);
    CHECK((f * f).trace().real() > 1.0 - 1e-8);
    CHECK(stationarity_residual(L, rho) < 1e-10);
    CHECK_NOTHROW(rho.check_valid());
}

TEST_CASE("vacuum is stationary without drive") {
    SystemParams p;
    p.gamma = 1.0;
    p.focusing = 0.5;
    p.g = 0.2;
    const Liouvillian L(p, SpaceLayout(3));
    const DensityMatrix vac = basis_state(L.layout(), 0).projector();
    CHECK(L.apply(vac.matrix()).norm() == 0.0);
    const DensityMatrix rho = steady_state(L);
    CHECK((rho.matrix() - vac.matrix()).norm() < 1e-12);
}

TEST_CASE("external atom marginal matches the resonance fluorescence state") {
    const double Y = 0.3;
    const SystemParams p = empty_cavity(1.0, 1.0, 0.5, Y);
    const Liouvillian L(p, SpaceLayout(8));
    const DensityMatrix rho = steady_state(L);
    const Eigen::Matrix2cd a = partial_trace_atom(rho, 2);
    const double d = 1.0 + Y * Y;
    Eigen::Matrix2cd expected;
    expected << 0.5 * (2.0 + Y * Y) / d, -Y / (std::sqrt(2.0) * d), -Y / (std::sqrt(2.0) * d),
        0.5 * Y * Y / d;
    CHECK((a - expected).cwiseAbs().maxCoeff() < 1e-6);
    // The undriven internal atom stays in its ground state.
    CHECK(partial_trace_atom(rho, 1)(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("internal atom inversion in the bad-cavity regime") {
    SystemParams p;
    p.kappa = 1.0;
    p.eps_d = 0.04;
    p.g = 0.5 * p.eps_d;
    p.gamma_s = 0.25 * p.eps_d;
    p.gamma = 0.0156 * p.eps_d;
    p.focusing = 0.9;
    const Liouvillian L(p, SpaceLayout(5));
    const DensityMatrix rho = steady_state(L);
    CHECK(rho.expect(L.ops().s1z).real() == doctest::Approx(-0.95).epsilon(0.02 / 0.95));
    CHECK(stationarity_residual(L, rho) < 1e-10);
    CHECK_NOTHROW(rho.check_valid());
}

TEST_CASE("degenerate stationary manifold is reported") {
    SystemParams p;
    p.kappa = 0.0;
    p.g = 1.0;
    CHECK_THROWS_AS(steady_state(Liouvillian(p, SpaceLayout(3))), SingularSolve);
}

TEST_CASE("truncated steady state is rejected") {
    SystemParams p;
    p.eps_d = 3.0;
    CHECK_THROWS_AS(steady_state(Liouvillian(p, SpaceLayout(6))), TruncationError);
    CHECK_NOTHROW(steady_state(Liouvillian(p, SpaceLayout(6)), {.truncation_tol = 0.0}));
}

TEST_CASE("propagation conserves trace and hermiticity") {
    SystemParams p = empty_cavity(1.0, 2.0, 0.6, 1.5);
    p.g = 0.4;
    p.gamma_s = 0.2;
    const Liouvillian L(p, SpaceLayout(8));
    const DensityMatrix rho0 = basis_state(L.layout(), 1).projector();
    const std::vector<double> t = linspace(0.0, 100.0, 51);
    const auto out = evolve(L, rho0, t);
    for (const DensityMatrix& r : out) {
        CHECK(std::abs(r.trace_real() - 1.0) < 1e-9);
        CHECK(r.hermiticity_defect() < 1e-10);
    }
    // Long-time limit is the stationary state.
    CHECK((out.back().matrix() - steady_state(L).matrix()).norm() < 1e-7);
}

TEST_CASE("eigen expansion agrees with direct integration") {
    SystemParams p = empty_cavity(1.0, 0.7, 0.8, 2.0);
    p.g = 0.3;
    p.gamma_s = 0.1;
    const Liouvillian L(p, SpaceLayout(3));
    const EigenPropagator ep(L);
    const Vector x0 = vec(basis_state(L.layout(), 2, 1, 0).projector().matrix());
    const std::vector<double> t = {0.0, 0.3, 1.7, 6.0};
    propagate(L.matrix(), x0, t, [&](std::size_t k, const Vector& x) {
        CHECK((x - ep.apply(x0, t[k])).norm() < 1e-8);
    });
    CHECK_THROWS_AS(EigenPropagator(Liouvillian(p, SpaceLayout(10))), InvalidArgument);
}

TEST_CASE("step collapse raises a stiffness failure") {
    SparseOp L(2, 2);
    L.insert(0, 0) = -1e15;
    L.insert(1, 1) = -1.0;
    Vector x0(2);
    x0 << 1.0, 1.0;
    CHECK_THROWS_AS(propagate(L, x0, {0.5, 1.0}, [](std::size_t, const Vector&) {}), StiffnessFailure);
}

TEST_CASE("regression with identity operators is constant") {
    SystemParams p = empty_cavity(1.0, 1.0, 0.5, 1.0);
    p.g = 0.2;
    const Liouvillian L(p, SpaceLayout(9));
    const DensityMatrix rho = steady_state(L);
    const auto s = regression_correlator(L, rho, L.ops().id, L.ops().id, linspace(0.0, 5.0, 11));
    for (const cplx v : s.values) CHECK(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("regression correlators reproduce resonance fluorescence") {
    for (double Y : {0.3, 2.0}) {
        CAPTURE(Y);
        const SystemParams p = empty_cavity(1.0, 1.0, 0.5, Y);
        const Liouvillian L(p, SpaceLayout(12));
        const DensityMatrix rho = steady_state(L);
        const Fluorescence f(1.0, Y);
        const std::vector<double> tau = linspace(0.0, 12.0, 49);
        const auto pm = fluctuation_correlator(L, rho, L.ops().s2p, L.ops().s2m, tau);
        const auto pp = fluctuation_correlator(L, rho, L.ops().s2p, L.ops().s2p, tau);
        const auto pz = fluctuation_correlator(L, rho, L.ops().s2p, L.ops().s2z, tau);
        const std::vector<double> g2 = numeric_g2(L, rho, sideways_operator(p, L.ops()), tau);
        const std::vector<double> g2a = g2_sideways(1.0, Y, tau);
        for (std::size_t k = 0; k < tau.size(); ++k) {
            CHECK(std::abs(pm.values[k] - f.corr_pm(tau[k])) < 1e-6);
            CHECK(std::abs(pp.values[k] - f.corr_pp(tau[k])) < 1e-6);
            CHECK(std::abs(pz.values[k] - f.corr_pz(tau[k])) < 1e-6);
            CHECK(std::abs(g2[k] - g2a[k]) < 1e-6);
        }
        CHECK(std::abs(g2[0]) < 1e-6);
    }
}

TEST_CASE("forwards g2 at zero coupling") {
    const std::vector<double> tau = linspace(0.0, 10.0, 41);
    for (double focusing : {0.3, 0.7}) {
        CAPTURE(focusing);
        const SystemParams p = empty_cavity(1.0, 0.5, focusing, 0.8);
        const Liouvillian L(p, SpaceLayout(10));
        const DensityMatrix rho = steady_state(L);
        const std::vector<double> g2 = numeric_g2(L, rho, forwards_operator(p, L.ops()), tau);
        const std::vector<double> g2a = g2_forwards_badcavity(p, tau);
        for (std::size_t k = 0; k < tau.size(); ++k) CHECK(g2[k] == doctest::Approx(g2a[k]).epsilon(1e-6));
    }
}

TEST_CASE("forwards g2 at zero delay in the weak-excitation limit") {
    // eps_d/kappa = 0.01 and focusing 0.5: perfect antibunching at tau = 0.
    SystemParams p;
    p.kappa = 1.0;
    p.gamma = 4.0;
    p.eps_d = 0.01;
    p.focusing = 0.5;
    const Liouvillian L(p, SpaceLayout(4));
    const DensityMatrix rho = steady_state(L);
    const auto g2 = numeric_g2(L, rho, forwards_operator(p, L.ops()), {0.0});
    CHECK(std::abs(g2[0]) < 5e-3);
}

TEST_CASE("sideways g2 vanishes at zero delay with the internal atom") {
    SystemParams p;
    p.kappa = 1.0;
    p.eps_d = 0.04;
    p.g = 0.02;
    p.gamma = 0.01;
    p.gamma_s = 0.005;
    p.focusing = 0.9;
    const Liouvillian L(p, SpaceLayout(4));
    const DensityMatrix rho = steady_state(L);
    CHECK(std::abs(numeric_g2(L, rho, sideways_operator(p, L.ops()), {0.0})[0]) < 1e-6);
}

TEST_CASE("forwards flux") {
    SUBCASE("closed form at zero coupling") {
        const SystemParams p = empty_cavity(1.0, 3.0, 0.7, 0.5);
        const DensityMatrix rho = steady_state(Liouvillian(p, SpaceLayout(6)));
        CHECK(forwards_flux(rho, p) == doctest::Approx(forwards_flux_analytic(p)).epsilon(1e-8));
    }
    SUBCASE("bare cavity output without the atom") {
        SystemParams p;
        p.kappa = 2.0;
        p.eps_d = 0.5;
        const DensityMatrix rho = steady_state(Liouvillian(p, SpaceLayout(8)));
        CHECK(forwards_flux(rho, p) == doctest::Approx(2.0 * 2.0 * 0.25 * 0.25).epsilon(1e-10));
    }
    SUBCASE("weak drive") {
        const SystemParams p = empty_cavity(1.0, 0.2, 0.4, 0.01);
        const DensityMatrix rho = steady_state(Liouvillian(p, SpaceLayout(3)));
        const double a = p.eps_d / p.kappa;
        CHECK(forwards_flux(rho, p) == doctest::Approx(2.0 * p.kappa * a * a * 0.36).epsilon(2e-4));
    }
}

namespace {

struct Fig2Case {
    SystemParams p;
    Liouvillian L;
    DensityMatrix rho;
    ForwardsCorrelators c;
};

Fig2Case fig2_case(double focusing) {
    SystemParams p;
    p.gamma = 1.0;
    p.kappa = 200.0;
    p.eps_d = 50.0;
    p.focusing = focusing;
    Liouvillian L(p, SpaceLayout(7));
    DensityMatrix rho = steady_state(L);
    // tau-bar step 0.005 out to tau-bar = 22
    const std::vector<double> tau = linspace(0.0, 44.0, 4401);
    ForwardsCorrelators c = forwards_correlators(L, rho, tau);
    return {p, std::move(L), std::move(rho), std::move(c)};
}

}  // namespace

TEST_CASE("numeric spectra match the closed forms") {
    const std::vector<double> omega = linspace(-30.0, 30.0, 241);
    for (double focusing : {0.05, 0.4}) {
        CAPTURE(focusing);
        const Fig2Case fc = fig2_case(focusing);
        const Spectrum num = numeric_incoherent_spectrum(fc.c.pm, 0.5, omega);
        const Spectrum ana = incoherent_spectrum(fc.p, omega);
        CHECK(num.norm == SpectrumNorm::unit_area);
        double worst = 0.0;
        for (std::size_t j = 0; j < omega.size(); ++j)
            worst = std::max(worst, std::abs(num.values[j] - ana.values[j]));
        CHECK(worst < 1e-3);

        for (double theta : {0.0, std::numbers::pi / 2}) {
            const Spectrum sn = squeezing_from_correlators(fc.c, 0.5, 1.0, theta, omega);
            const Spectrum sa = squeezing_spectrum(fc.p, theta, omega);
            double scale = 0.0;
            double dev = 0.0;
            for (std::size_t j = 0; j < omega.size(); ++j) {
                scale = std::max(scale, std::abs(sa.values[j]));
                dev = std::max(dev, std::abs(sn.values[j] - sa.values[j]));
            }
            CHECK(dev < 1e-3 * scale);
        }
        // The flux used for normalization is the fluctuation intensity.
        CHECK(fc.c.flux == doctest::Approx(forwards_fluctuation_intensity(fc.p)).epsilon(1e-8));
    }
}

TEST_CASE("numeric spectrum has unit area over the Nyquist band") {
    const Fig2Case fc = fig2_case(0.4);
    const double h = 0.5 * (fc.c.pm.tau[1] - fc.c.pm.tau[0]);
    const double wmax = std::numbers::pi / h;
    const std::vector<double> omega = linspace(-wmax, wmax, 4 * 4401 + 1);
    const Spectrum s = numeric_incoherent_spectrum(fc.c.pm, 0.5, omega);
    CHECK(trapezoid(s.omega, s.values) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("sidebands of the Mollow triplet") {
    const Fig2Case fc = fig2_case(0.4);
    const double Y = derive(fc.p).Y;
    const std::vector<double> omega = linspace(0.0, 3.0 * Y, 601);
    const Spectrum s = numeric_incoherent_spectrum(fc.c.pm, 0.5, omega);
    // Side peak: the largest local maximum away from the centre.
    std::size_t best = 0;
    for (std::size_t j = 60; j + 1 < omega.size(); ++j)
        if (s.values[j] > s.values[j - 1] && s.values[j] >= s.values[j + 1] &&
            (best == 0 || s.values[j] > s.values[best]))
            best = j;
    REQUIRE(best > 0);
    CHECK(omega[best] == doctest::Approx(std::sqrt(2.0) * Y).epsilon(0.05));
}

TEST_CASE("unconverged tails are rejected") {
    const SystemParams p = empty_cavity(1.0, 1.0, 0.5, 1.0);
    const Liouvillian L(p, SpaceLayout(9));
    const DensityMatrix rho = steady_state(L);
    const auto c = forwards_correlators(L, rho, linspace(0.0, 3.0, 31));
    CHECK_THROWS_AS(numeric_incoherent_spectrum(c.pm, 0.5, {0.0}), UnconvergedTail);
    CHECK_THROWS_AS(squeezing_from_correlators(c, 0.5, 1.0, 0.0, {0.0}), UnconvergedTail);
}

TEST_CASE("squeezing spectrum signs") {
    SystemParams p = empty_cavity(1.0, 1.0, 0.5, 0.2);
    const Liouvillian L(p, SpaceLayout(5));
    const DensityMatrix rho = steady_state(L);
    const std::vector<double> tau = linspace(0.0, 50.0, 2001);
    const std::vector<double> omega = linspace(-10.0, 10.0, 41);
    const Spectrum in_phase = numeric_squeezing_spectrum(L, rho, 0.0, omega, tau);
    const Spectrum out_phase = numeric_squeezing_spectrum(L, rho, std::numbers::pi / 2, omega, tau);
    CHECK(in_phase.values[20] < 0.0);
    for (double v : out_phase.values) CHECK(v >= 0.0);
    const Spectrum norm = numeric_squeezing_spectrum(L, rho, 0.0, omega, tau, true);
    CHECK(norm.norm == SpectrumNorm::normalized);
    const double flux = forwards_fluctuation_intensity(p);
    CHECK(norm.values[20] == doctest::Approx(in_phase.values[20] / (16.0 * flux)).epsilon(1e-6));
}
