#include "doctest.h"

#include "cqed/errors.hpp"
#include "cqed/params.hpp"

#include <cmath>

using namespace cqed;

namespace {

SystemParams fig2_like(double focusing) {
    SystemParams p;
    p.gamma = 1.0;
    p.kappa = 200.0;
    p.eps_d = 50.0;
    p.focusing = focusing;
    return p;
}

}  // namespace

TEST_CASE("drive amplitude from direct substitution") {
    // alpha_ss = eps_d/kappa = 0.25, Y = 2 sqrt(2 kappa focusing/gamma) alpha_ss = sqrt(40)
    const DerivedParams d = derive(fig2_like(0.4));
    CHECK(d.Y == doctest::Approx(6.324555320336759).epsilon(1e-14));
    const double direct = 2.0 * std::sqrt(2.0 * 200.0 * 0.4 / 1.0) * 0.25;
    CHECK(d.Y == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("shift vanishes at the exceptional drive") {
    CHECK(bloch_shift(1.0, exceptional_Y) == cplx(0.0, 0.0));
    CHECK(bloch_shift(3.0, 0.0) == cplx(0.75, 0.0));
    const cplx above = bloch_shift(1.0, 1.0);
    CHECK(above.real() == 0.0);
    CHECK(above.imag() == doctest::Approx(0.25 * std::sqrt(7.0)));
}

TEST_CASE("shift satisfies its defining identity") {
    for (double Y : {0.0, 0.1, 0.3, 0.35, 0.5, 2.0, 9.0}) {
        const double gamma = 1.7;
        const cplx d = bloch_shift(gamma, Y);
        const double q = gamma / 4.0;
        CHECK(std::abs(d * d + q * q * 8.0 * Y * Y - q * q) < 1e-13 * (1.0 + 8.0 * Y * Y));
    }
}

TEST_CASE("mapping cooperativity") {
    CHECK(mapping_cooperativity(0.5) == 0.5);
    CHECK(mapping_cooperativity(0.0) == 0.0);
    CHECK_THROWS_AS(mapping_cooperativity(1.0), DivergentCooperativity);
    SystemParams p = fig2_like(1.0);
    CHECK_FALSE(derive(p).coop_C.has_value());
    CHECK_THROWS_AS(derive(p, true), DivergentCooperativity);
}

TEST_CASE("derived rates") {
    SystemParams p = fig2_like(0.4);
    p.g = 2.0;
    p.gamma_s = 0.5;
    const DerivedParams d = derive(p);
    CHECK(d.g_bar == doctest::Approx(std::sqrt(200.0 * 0.4 * 1.0 / 2.0)));
    CHECK(d.gamma_s_bar == doctest::Approx(0.6));
    REQUIRE(d.purcell_C.has_value());
    CHECK(*d.purcell_C == doctest::Approx(4.0 / 100.0));
    REQUIRE(d.Y_bar.has_value());
    CHECK(*d.Y_bar == doctest::Approx(2.0 * std::sqrt(2.0) * 2.0 * 50.0 / 100.0));
    CHECK(d.Y_prime == doctest::Approx(*d.Y_bar / (1.0 + 2.0 * *d.purcell_C)));
    REQUIRE(d.lambda_crit.has_value());
    CHECK(*d.lambda_crit == doctest::Approx(0.0004));
}

TEST_CASE("sideways-dependent fields are absent without sideways emission") {
    SystemParams p = fig2_like(0.4);
    p.g = 2.0;
    const DerivedParams d = derive(p);
    CHECK_FALSE(d.purcell_C.has_value());
    CHECK_FALSE(d.Y_bar.has_value());
    CHECK(d.Y_prime == doctest::Approx(std::sqrt(2.0) * 50.0 / 2.0));
    CHECK(d.Y_pp == doctest::Approx(d.Y_pp_limit).epsilon(1e-12));
}

TEST_CASE("dressed external drive limits") {
    SystemParams p;
    p.kappa = 1.0;
    p.gamma = 0.01;
    p.eps_d = 0.04;
    p.focusing = 0.9;
    const double Y = derive(p).Y;
    p.g = 0.0;
    CHECK(derive(p).Y_pp == doctest::Approx(Y));
    CHECK(derive(p).Y_pp_limit == doctest::Approx(Y));
    p.g = 1000.0 * p.eps_d;
    CHECK(derive(p).Y_pp_limit < 1e-5 * Y);
}

TEST_CASE("missing cavity and invalid input") {
    SystemParams p = fig2_like(0.4);
    p.kappa = 0.0;
    CHECK_THROWS_AS(derive(p), MissingCavity);
    p = fig2_like(0.4);
    p.gamma = -1.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = fig2_like(1.2);
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = fig2_like(0.4);
    p.eta = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    try {
        derive(fig2_like(2.0));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidArgument);
        CHECK(e.is_input_error());
    }
}

TEST_CASE("dimensionless quantities are scale invariant") {
    SystemParams p = fig2_like(0.3);
    p.g = 3.0;
    p.gamma_s = 0.7;
    const DerivedParams a = derive(p);
    const DerivedParams b = derive(p.scaled(13.5));
    CHECK(b.Y == doctest::Approx(a.Y).epsilon(1e-13));
    CHECK(*b.coop_C == doctest::Approx(*a.coop_C).epsilon(1e-13));
    CHECK(*b.lambda_crit == doctest::Approx(*a.lambda_crit).epsilon(1e-13));
    CHECK(*b.purcell_C == doctest::Approx(*a.purcell_C).epsilon(1e-13));
    CHECK(b.Y_pp == doctest::Approx(a.Y_pp).epsilon(1e-13));
}

TEST_CASE("neoclassical field") {
    SystemParams p;
    p.kappa = 1.0;
    p.g = 100.0;
    SUBCASE("threshold") {
        p.eps_d = 50.0;
        const NeoclassicalField f = neoclassical_field(p);
        CHECK(std::abs(f.plus) == 0.0);
        CHECK(std::abs(f.minus) == 0.0);
    }
    SUBCASE("empty cavity") {
        p.g = 0.0;
        p.eps_d = 0.3;
        const NeoclassicalField f = neoclassical_field(p);
        CHECK_FALSE(f.bimodal);
        CHECK(f.plus == cplx(0.3, 0.0));
    }
    SUBCASE("below threshold") {
        p.eps_d = 49.5;
        CHECK(std::abs(neoclassical_field(p).plus) == 0.0);
        CHECK_THROWS_AS(neoclassical_atoms(p), BelowThreshold);
    }
    SUBCASE("just above threshold") {
        p.eps_d = 50.1;
        const NeoclassicalField f = neoclassical_field(p);
        CHECK(f.bimodal);
        CHECK(f.minus == std::conj(f.plus));
        const double lam = std::pow(p.g / (2.0 * p.eps_d), 2);
        const double expected = std::pow(p.eps_d / p.kappa, 2) * (1 - lam) * (1 - lam) +
                                std::pow(p.g / (2.0 * p.kappa), 2) * (1 - lam);
        CHECK(std::norm(f.plus) == doctest::Approx(expected).epsilon(1e-12));
        // Mean-field value only; the quantum photon number here is several times larger.
        CHECK(std::norm(f.plus) == doctest::Approx(10.01).epsilon(1e-12));
    }
}

TEST_CASE("neoclassical atoms") {
    SystemParams p;
    p.kappa = 1.0;
    p.g = 100.0;
    p.eps_d = 60.0;
    p.gamma = 40.0;
    p.focusing = 0.9;
    for (Branch b : {Branch::Plus, Branch::Minus}) {
        const NeoclassicalAtoms s = neoclassical_atoms(p, b);
        CHECK(s.zeta1 == 0.0);
        CHECK(std::abs(s.beta1) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(4.0 * std::norm(s.beta1) + s.zeta1 * s.zeta1 == doctest::Approx(1.0).epsilon(1e-14));
        const cplx Y = drive_amplitude(p, s.alpha);
        CHECK(s.zeta2 == doctest::Approx(-1.0 / (1.0 + std::norm(Y))));
    }
    CHECK(neoclassical_atoms(p, Branch::Plus).beta1 == std::conj(neoclassical_atoms(p, Branch::Minus).beta1));

    SystemParams zero;
    zero.kappa = 1.0;
    zero.gamma = 1.0;
    zero.focusing = 0.5;
    const NeoclassicalAtoms s0 = neoclassical_atoms(zero);
    CHECK(s0.beta2 == cplx(0.0, 0.0));
    CHECK(s0.zeta2 == -1.0);

    const auto [beta, zeta] = resonance_fluorescence_state(cplx(300.0, 0.0));
    CHECK(zeta == doctest::Approx(-1.0 / 90000.0).epsilon(1e-4));
    CHECK(std::abs(beta) < 0.01);
}

TEST_CASE("error codes have names") {
    CHECK(to_string(ErrorCode::Truncation) == "TruncationError");
    CHECK(std::string(TruncationError("x").what()).find("TruncationError") == 0);
    CHECK_FALSE(StiffnessFailure("x").is_input_error());
}
