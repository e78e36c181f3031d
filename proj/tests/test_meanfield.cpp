#include "doctest.h"

#include "cqed/errors.hpp"
#include "cqed/meanfield.hpp"
#include "cqed/series.hpp"

#include <cmath>

using namespace cqed;

namespace {

SystemParams strong_coupling(double eps_over_g) {
    SystemParams p;
    p.kappa = 1.0;
    p.g = 100.0;
    p.gamma = 0.004;
    p.focusing = 0.95;
    p.eps_d = eps_over_g * p.g;
    return p;
}

}  // namespace

TEST_CASE("undriven ground state is a fixed point") {
    SystemParams p;
    p.g = 1.0;
    p.gamma = 0.5;
    p.focusing = 0.5;
    p.gamma_s = 0.2;
    const auto out = integrate_meanfield(p, MeanFieldState::ground(), {0.0, 10.0});
    CHECK(std::abs(out.back().alpha) == 0.0);
    CHECK(out.back().zeta1 == -1.0);
    CHECK(out.back().zeta2 == -1.0);
    CHECK(meanfield_residual(p, MeanFieldState::ground()) == 0.0);
}

TEST_CASE("empty-cavity field builds up exponentially") {
    SystemParams p;
    p.kappa = 0.7;
    p.eps_d = 0.3;
    p.gamma = 1.0;
    p.focusing = 0.4;
    const std::vector<double> t = {0.0, 0.5, 1.0, 3.0, 8.0};
    const auto out = integrate_meanfield(p, MeanFieldState::ground(), t);
    for (std::size_t k = 0; k < t.size(); ++k)
        CHECK(std::abs(out[k].alpha - (0.3 / 0.7) * (1.0 - std::exp(-0.7 * t[k]))) < 1e-10);
    // With the field settled, the external atom relaxes to the resonance fluorescence state.
    const auto late = integrate_meanfield(p, MeanFieldState::ground(), {200.0}).back();
    const auto [beta, zeta] = resonance_fluorescence_state(drive_amplitude(p, 0.3 / 0.7));
    CHECK(std::abs(late.beta2 - beta) < 1e-9);
    CHECK(late.zeta2 == doctest::Approx(zeta).epsilon(1e-9));
}

TEST_CASE("pseudo-spin is conserved without sideways emission") {
    SystemParams p;
    p.kappa = 1.0;
    p.g = 2.0;
    p.eps_d = 1.5;
    p.gamma = 0.3;
    p.focusing = 0.5;
    MeanFieldState s0 = MeanFieldState::ground();
    s0.beta1 = cplx(0.3, 0.1);
    s0.zeta1 = -std::sqrt(1.0 - 4.0 * std::norm(s0.beta1));
    const double spin0 = s0.pseudo_spin1();
    const auto out = integrate_meanfield(p, s0, linspace(0.0, 1000.0, 201));
    double worst = 0.0;
    for (const auto& s : out) worst = std::max(worst, std::abs(s.pseudo_spin1() - spin0));
    CHECK(worst < 1e-8);
}

TEST_CASE("invalid initial states are rejected") {
    MeanFieldState s = MeanFieldState::ground();
    s.zeta1 = -1.1;
    CHECK_THROWS_AS(integrate_meanfield(SystemParams{}, s, {1.0}), InvalidArgument);
    s = MeanFieldState::ground();
    s.beta2 = cplx(0.4, 0.4);
    CHECK_THROWS_AS(s.check(), InvalidArgument);
}

TEST_CASE("neoclassical branches are fixed points") {
    for (double r : {0.501, 0.6, 2.0}) {
        SystemParams p = strong_coupling(r);
        p.kappa = 3.0;
        for (Branch b : {Branch::Plus, Branch::Minus}) {
            const NeoclassicalAtoms a = neoclassical_atoms(p, b);
            const MeanFieldState s{a.alpha, a.beta1, a.zeta1, a.beta2, a.zeta2};
            CHECK(meanfield_residual(p, s) < 1e-10 * (1.0 + p.g));
        }
    }
}

TEST_CASE("conjugate branches above threshold") {
    SystemParams p;
    p.kappa = 2.0;
    p.g = 10.0;
    p.eps_d = 6.0;
    p.gamma = 2.0;
    p.focusing = 0.9;
    const auto br = meanfield_branches(p);
    const MeanFieldState& up = br[0].state;
    const MeanFieldState& down = br[1].state;
    CHECK(up.alpha.imag() > 0.0);
    CHECK(std::abs(up.alpha - std::conj(down.alpha)) < 1e-12);
    CHECK(up.beta1.imag() * up.beta2.imag() < 0.0);
    for (const auto& b : br) {
        CHECK(b.residual < 1e-10 * (1.0 + p.g));
        CHECK(std::abs(b.state.zeta1) < 1e-12);
        // Neutral: no growing and no decaying mode across the orbit.
        CHECK(std::abs(b.growth_rate) < 1e-9);
    }

    SUBCASE("trajectories started on a branch stay there") {
        for (const auto& b : br) {
            const auto out = integrate_meanfield(p, b.state, linspace(0.0, 400.0, 81));
            double drift = 0.0;
            for (const auto& s : out)
                drift = std::max({drift, std::abs(s.alpha - b.state.alpha), std::abs(s.beta1 - b.state.beta1),
                                  std::abs(s.beta2 - b.state.beta2)});
            CHECK(drift < 1e-6);
        }
    }
    SUBCASE("nearby trajectories circle rather than converge") {
        MeanFieldState s0 = up;
        s0.alpha += cplx(0.0, 1e-3);
        const auto out = integrate_meanfield(p, s0, linspace(0.0, 400.0, 4001));
        double early = 0.0, late = 0.0;
        for (std::size_t k = 100; k < out.size(); ++k) {
            const double d = std::abs(out[k].alpha - up.alpha) + std::abs(out[k].beta1 - up.beta1);
            double& envelope = k < 1000 ? early : late;
            envelope = std::max(envelope, d);
        }
        CHECK(early < 1e-2);
        // The oscillation envelope neither grows nor decays.
        CHECK(late == doctest::Approx(early).epsilon(0.05));
    }
    SUBCASE("below threshold there is no branch") {
        p.eps_d = 4.0;
        CHECK_THROWS_AS(meanfield_branches(p), BelowThreshold);
    }
}

TEST_CASE("adiabatic steady state") {
    SUBCASE("fixed point of the eliminated equations") {
        SystemParams p;
        p.kappa = 1.0;
        p.eps_d = 0.04;
        p.g = 0.02;
        p.gamma_s = 0.01;
        p.gamma = 0.000624;
        p.focusing = 0.9;
        const AdiabaticSteadyState s = adiabatic_steady_state(p);
        for (const cplx r : adiabatic_rhs(p, s)) CHECK(std::abs(r) < 1e-10);
        CHECK(s.bad_cavity);
        REQUIRE(s.Y_bar.has_value());
        const double C = p.g * p.g / (p.kappa * p.gamma_s);
        const double Yb = *s.Y_bar;
        CHECK(s.zeta1 == doctest::Approx(-(1 + 2 * C) * (1 + 2 * C) / ((1 + 2 * C) * (1 + 2 * C) + Yb * Yb)));
        CHECK(s.beta1.real() ==
              doctest::Approx(-Yb * (1 + 2 * C) / (std::sqrt(2.0) * ((1 + 2 * C) * (1 + 2 * C) + Yb * Yb))));
    }
    SUBCASE("without sideways emission") {
        SystemParams p;
        p.kappa = 1.0;
        p.eps_d = 0.04;
        p.g = 0.04;
        p.gamma = 0.000624;
        p.focusing = 0.9;
        const AdiabaticSteadyState s = adiabatic_steady_state(p);
        CHECK_FALSE(s.Y_bar.has_value());
        CHECK(s.Y_prime == doctest::Approx(std::sqrt(2.0) * p.eps_d / p.g));
        for (const cplx r : adiabatic_rhs(p, s)) CHECK(std::abs(r) < 1e-10);
        CHECK(s.Y_pp == doctest::Approx(s.Y_pp_limit).epsilon(1e-12));
    }
    SUBCASE("empty cavity limit") {
        SystemParams p;
        p.kappa = 1.0;
        p.eps_d = 0.04;
        p.gamma = 0.01;
        p.focusing = 0.9;
        const double Y = derive(p).Y;
        p.g = 1e-9;
        CHECK(adiabatic_steady_state(p).Y_pp == doctest::Approx(Y).epsilon(1e-6));
    }
    SUBCASE("strong internal coupling suppresses the external drive") {
        SystemParams p;
        p.kappa = 1.0;
        p.eps_d = 0.001;
        p.g = 0.1;
        p.gamma = 0.001;
        p.focusing = 0.9;
        const AdiabaticSteadyState s = adiabatic_steady_state(p);
        CHECK(s.Y_pp_limit < 1e-3 * derive(p).Y);
        CHECK_FALSE(adiabatic_steady_state(strong_coupling(0.6)).bad_cavity);
    }
    SUBCASE("sideways drive for the coupling sweep") {
        // eps_d/kappa = 0.04, focusing 0.9, gamma/eps_d = 0.0156
        for (double r : {0.05, 1.0, 2.5}) {
            SystemParams p;
            p.kappa = 1.0;
            p.eps_d = 0.04;
            p.g = r * p.eps_d;
            p.gamma = 0.0156 * p.eps_d;
            p.focusing = 0.9;
            const double e = 1.0 / r;
            const double expected =
                2.0 * p.eps_d * std::sqrt(2.0 * 0.9 / (p.gamma)) * (1.0 - 1.0 / (1.0 + 2.0 * e * e));
            CHECK(adiabatic_steady_state(p).Y_pp_limit == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("critical scaling") {
    std::vector<SystemParams> sweep;
    for (int k = 0; k <= 24; ++k) {
        const double dist = std::pow(10.0, -4.0 + 3.0 * k / 24.0);  // 1 - lambda
        sweep.push_back(strong_coupling(0.5 / std::sqrt(1.0 - dist)));
    }
    sweep.push_back(strong_coupling(0.495));  // below threshold, ignored
    const CriticalScaling r = critical_scaling(sweep);
    CHECK(r.points.size() == 25);
    CHECK(r.field.exponent == doctest::Approx(0.5).epsilon(0.02 / 0.5));
    CHECK(r.beta2.exponent == doctest::Approx(-0.5).epsilon(0.05 / 0.5));
    CHECK(r.zeta2.exponent == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(r.max_abs_zeta1 == 0.0);
    CHECK(r.max_beta1_deviation < 1e-14);

    const std::vector<SystemParams> few(sweep.begin(), sweep.begin() + 5);
    CHECK_THROWS_AS(critical_scaling(few), InsufficientWindow);
}

TEST_CASE("power-law fit recovers an exact law") {
    std::vector<double> x, y;
    for (int i = 1; i <= 10; ++i) {
        x.push_back(0.1 * i);
        y.push_back(3.0 * std::pow(0.1 * i, -1.5));
    }
    const PowerLawFit f = fit_power_law(x, y);
    CHECK(f.exponent == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(f.prefactor == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.points == 10);
}
