#include "cqed/params.hpp"

#include "cqed/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace cqed {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DivergentCooperativity: return "DivergentCooperativity";
        case ErrorCode::MissingCavity: return "MissingCavity";
        case ErrorCode::BelowThreshold: return "BelowThreshold";
        case ErrorCode::Truncation: return "TruncationError";
        case ErrorCode::SingularSolve: return "SingularSolve";
        case ErrorCode::StiffnessFailure: return "StiffnessFailure";
        case ErrorCode::UnconvergedTail: return "UnconvergedTail";
        case ErrorCode::InsufficientWindow: return "InsufficientWindow";
        case ErrorCode::NoSwitchesDetected: return "NoSwitchesDetected";
    }
    return "Error";
}

namespace {

void require_rate(double value, const char* name) {
    if (!std::isfinite(value) || value < 0.0) {
        throw InvalidArgument(std::string(name) + " must be a finite non-negative rate, got " +
                              std::to_string(value));
    }
}

// 2 sqrt(2 focusing / (kappa gamma)): converts a drive rate into the
// external atom's dimensionless amplitude.
double external_drive_scale(const SystemParams& p) {
    if (p.gamma > 0.0) return 2.0 * std::sqrt(2.0 * p.focusing / (p.kappa * p.gamma));
    return p.focusing > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

double scaled_or_zero(double scale, double rate) {
    return rate == 0.0 ? 0.0 : scale * rate;
}

}  // namespace

void SystemParams::validate() const {
    require_rate(g, "g");
    require_rate(kappa, "kappa");
    require_rate(gamma, "gamma");
    require_rate(gamma_s, "gamma_s");
    require_rate(eps_d, "eps_d");
    if (!(focusing >= 0.0 && focusing <= 1.0)) {
        throw InvalidArgument("focusing must lie in [0, 1], got " + std::to_string(focusing));
    }
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw InvalidArgument("eta must lie in (0, 1], got " + std::to_string(eta));
    }
    if (!std::isfinite(theta)) throw InvalidArgument("theta must be finite");
}

SystemParams SystemParams::scaled(double s) const {
    SystemParams out = *this;
    out.g *= s;
    out.kappa *= s;
    out.gamma *= s;
    out.gamma_s *= s;
    out.eps_d *= s;
    return out;
}

cplx bloch_shift(double gamma, double Y) {
    double radicand = std::fma(-8.0 * Y, Y, 1.0);
    // Y = 1/(2 sqrt2) is not representable; treat its rounding neighbourhood
    // as the exceptional point itself.
    if (std::abs(radicand) <= 8.0 * std::numeric_limits<double>::epsilon()) radicand = 0.0;
    return 0.25 * gamma * std::sqrt(cplx(radicand, 0.0));
}

double mapping_cooperativity(double focusing) {
    if (focusing >= 1.0) {
        throw DivergentCooperativity("mapping cooperativity diverges at focusing = 1");
    }
    return focusing / (2.0 * (1.0 - focusing));
}

DerivedParams derive(const SystemParams& p, bool need_cooperativity) {
    p.validate();
    if (p.kappa == 0.0) throw MissingCavity("kappa must be positive for derived quantities");

    DerivedParams d;
    const double scale = external_drive_scale(p);
    d.Y = scaled_or_zero(scale, p.eps_d);
    d.delta = std::isfinite(d.Y) ? bloch_shift(p.gamma, d.Y) : cplx(0.0, 0.0);

    if (p.focusing < 1.0) {
        d.coop_C = mapping_cooperativity(p.focusing);
    } else if (need_cooperativity) {
        throw DivergentCooperativity("focusing = 1 has no finite mapping cooperativity");
    }
    d.g_bar = std::sqrt(p.kappa * p.focusing * p.gamma / 2.0);
    d.gamma_s_bar = 2.0 * (1.0 - p.focusing) * (p.gamma / 2.0);

    if (p.gamma_s > 0.0) {
        d.purcell_C = p.g * p.g / (p.kappa * p.gamma_s);
        d.Y_bar = 2.0 * std::sqrt(2.0) * p.g * p.eps_d / (p.kappa * p.gamma_s);
    }
    const double damping = p.kappa * p.gamma_s + 2.0 * p.g * p.g;
    d.Y_prime = damping > 0.0 ? 2.0 * std::sqrt(2.0) * p.g * p.eps_d / damping : 0.0;

    const double beta1 = -d.Y_prime / (std::sqrt(2.0) * (1.0 + d.Y_prime * d.Y_prime));
    d.Y_pp = scaled_or_zero(scale, p.eps_d + p.g * beta1);

    double bracket = 1.0;
    if (p.g > 0.0) {
        const double r = p.eps_d / p.g;
        bracket = 1.0 - 1.0 / (1.0 + 2.0 * r * r);
    }
    d.Y_pp_limit = scaled_or_zero(scale, p.eps_d * bracket);

    if (p.eps_d > 0.0) {
        const double x = p.g / (2.0 * p.eps_d);
        d.lambda_crit = x * x;
    }
    return d;
}

cplx drive_amplitude(const SystemParams& p, cplx alpha) {
    if (p.kappa == 0.0) throw MissingCavity("kappa must be positive");
    const double scale = external_drive_scale(p);
    if (alpha == cplx(0.0, 0.0)) return {0.0, 0.0};
    return scale * p.kappa * alpha;
}

std::pair<cplx, double> resonance_fluorescence_state(cplx Y) {
    const double y2 = std::norm(Y);
    return {-Y / (std::sqrt(2.0) * (1.0 + y2)), -1.0 / (1.0 + y2)};
}

NeoclassicalField neoclassical_field(const SystemParams& p) {
    p.validate();
    if (p.kappa == 0.0) throw MissingCavity("kappa must be positive");
    NeoclassicalField f;
    if (p.g == 0.0) {
        f.plus = f.minus = cplx(p.eps_d / p.kappa, 0.0);
        return f;
    }
    if (p.eps_d < p.g / 2.0) return f;  // alpha = 0 below threshold

    const double x = p.g / (2.0 * p.eps_d);
    const double one_minus_lambda = 1.0 - x * x;
    const double re = (p.eps_d / p.kappa) * one_minus_lambda;
    const double im = (p.g / (2.0 * p.kappa)) * std::sqrt(one_minus_lambda);
    f.bimodal = true;
    f.plus = {re, im};
    f.minus = {re, -im};
    return f;
}

NeoclassicalAtoms neoclassical_atoms(const SystemParams& p, Branch branch) {
    p.validate();
    if (p.kappa == 0.0) throw MissingCavity("kappa must be positive");
    NeoclassicalAtoms s;
    if (p.g == 0.0) {
        s.alpha = p.eps_d / p.kappa;
    } else {
        if (p.eps_d < p.g / 2.0) {
            throw BelowThreshold("neoclassical atomic states need eps_d >= g/2 (eps_d = " +
                                 std::to_string(p.eps_d) + ", g = " + std::to_string(p.g) + ")");
        }
        const NeoclassicalField f = neoclassical_field(p);
        const double sign = branch == Branch::Plus ? 1.0 : -1.0;
        s.alpha = branch == Branch::Plus ? f.plus : f.minus;
        const double x = p.g / (2.0 * p.eps_d);
        s.beta1 = {-p.g / (4.0 * p.eps_d), sign * 0.5 * std::sqrt(1.0 - x * x)};
        s.zeta1 = 0.0;
    }
    const auto [beta2, zeta2] = resonance_fluorescence_state(drive_amplitude(p, s.alpha));
    s.beta2 = beta2;
    s.zeta2 = zeta2;
    return s;
}

}  // namespace cqed
