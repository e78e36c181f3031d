#include "cqed/resfluor.hpp"

#include "cqed/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cqed {

namespace {

constexpr double sqrt2 = std::numbers::sqrt2;
constexpr double pi = std::numbers::pi;

// Lorentzian cosine transform a/(a^2 + w^2).
cplx lor(cplx a, double w) { return a / (a * a + w * w); }

// lor(a - x) + lor(a + x)
cplx lor_sum(double a, cplx x, double w) { return lor(a - x, w) + lor(a + x, w); }

// [lor(a - x) - lor(a + x)] / x, written without the 1/x cancellation.
cplx lor_diff(double a, cplx x, double w) {
    const cplx u = a - x;
    const cplx v = a + x;
    return -2.0 * (w * w - a * a + x * x) / ((u * u + w * w) * (v * v + w * w));
}

void require_positive_drive(double Y) {
    if (!(Y > 0.0) || !std::isfinite(Y)) {
        throw InvalidArgument("closed forms need a finite drive Y > 0, got " + std::to_string(Y));
    }
}

}  // namespace

cplx sinhc(cplx z) {
    if (std::abs(z) < 1e-3) {
        const cplx z2 = z * z;
        return 1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0));
    }
    return std::sinh(z) / z;
}

Eigen::Matrix3d bloch_matrix(double gamma, double Y) {
    Eigen::Matrix3d M;
    M << 1.0, 0.0, -Y / sqrt2,
         0.0, 1.0, -Y / sqrt2,
         sqrt2 * Y, sqrt2 * Y, 2.0;
    return -(gamma / 2.0) * M;
}

double BlochEigensystem::orthonormality_residual() const {
    const double r1 = std::abs(A2 * A2p * c2c2p + A3 * A3p * c3c3p - 1.0);
    const double r2 = std::abs(A2p * c2c2p + A3p * c3c3p);
    return std::max(r1, r2);
}

BlochEigensystem bloch_eigensystem(double gamma, double Y) {
    require_positive_drive(Y);
    if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
    BlochEigensystem e;
    e.M = bloch_matrix(gamma, Y);
    e.delta = bloch_shift(gamma, Y);
    e.exceptional_point = std::abs(e.delta) < 1e-12 * gamma;
    const double q = gamma / 4.0;
    e.lambda = {cplx(-gamma / 2.0, 0.0), -3.0 * q + e.delta, -3.0 * q - e.delta};
    e.A2 = (e.delta - q) * (2.0 * sqrt2 / (Y * gamma));
    e.A3 = -(e.delta + q) * (2.0 * sqrt2 / (Y * gamma));
    e.A2p = (q - e.delta) * (sqrt2 / (Y * gamma));
    e.A3p = (q + e.delta) * (sqrt2 / (Y * gamma));
    e.c2c2p = 0.25 * (1.0 + q / e.delta);
    e.c3c3p = 0.25 * (1.0 - q / e.delta);
    return e;
}

Fluorescence::Fluorescence(double gamma, double Y) : gamma_(gamma), Y_(Y), delta_(bloch_shift(gamma, Y)) {
    require_positive_drive(Y);
    if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
}

Fluorescence Fluorescence::external(const SystemParams& p) {
    return {p.gamma, derive(p).Y};
}

double Fluorescence::sigma_minus_ss() const { return -Y_ / (sqrt2 * (1.0 + Y_ * Y_)); }

double Fluorescence::sigma_z_ss() const { return -1.0 / (1.0 + Y_ * Y_); }

double Fluorescence::corr_pm(double tau) const {
    const double y2 = Y_ * Y_;
    const double pre = y2 / ((1.0 + y2) * (1.0 + y2));
    const cplx pair = std::exp(-0.75 * gamma_ * tau) *
                      (2.0 * (1.0 - y2) * std::cosh(delta_ * tau) +
                       2.0 * (1.0 - 5.0 * y2) * (gamma_ / 4.0) * tau * sinhc(delta_ * tau));
    return 0.25 * y2 / (1.0 + y2) * std::exp(-0.5 * gamma_ * tau) - pre / 8.0 * pair.real();
}

double Fluorescence::corr_pp(double tau) const {
    const double y2 = Y_ * Y_;
    return corr_pm(tau) - 0.5 * y2 / (1.0 + y2) * std::exp(-0.5 * gamma_ * tau);
}

double Fluorescence::corr_pz(double tau) const {
    const double y2 = Y_ * Y_;
    const cplx pair = std::exp(-0.75 * gamma_ * tau) *
                      (2.0 * std::cosh(delta_ * tau) +
                       2.0 * (1.0 - 2.0 * y2) * (gamma_ / 4.0) * tau * sinhc(delta_ * tau));
    return Y_ * y2 / (2.0 * sqrt2 * (1.0 + y2) * (1.0 + y2)) * pair.real();
}

double Fluorescence::corr_pz_as_printed(double tau) const {
    const double y2 = Y_ * Y_;
    const cplx pair = std::exp(-0.75 * gamma_ * tau) *
                      (2.0 * std::cosh(delta_ * tau) -
                       2.0 * (2.0 - Y_) * (gamma_ / 4.0) * tau * sinhc(delta_ * tau));
    return Y_ * y2 / (2.0 * sqrt2 * (1.0 + y2) * (1.0 + y2)) * pair.real();
}

std::array<cplx, 3> Fluorescence::corr_eigen(double tau) const {
    const BlochEigensystem e = bloch_eigensystem(gamma_, Y_);
    if (e.exceptional_point) {
        throw InvalidArgument("eigenvector expansion is undefined at the exceptional point");
    }
    const double y2 = Y_ * Y_;
    const double scale = 0.5 * y2 / ((1.0 + y2) * (1.0 + y2));
    const std::array<double, 3> v0 = {scale * y2, -scale, scale * sqrt2 * Y_};

    std::array<cplx, 3> out{};
    const cplx w1 = std::exp(e.lambda[0] * tau) * 0.5 * (v0[0] - v0[1]);
    out[0] += w1;
    out[1] -= w1;
    const cplx w2 = std::exp(e.lambda[1] * tau) * e.c2c2p * (v0[0] + v0[1] + e.A2p * v0[2]);
    const cplx w3 = std::exp(e.lambda[2] * tau) * e.c3c3p * (v0[0] + v0[1] + e.A3p * v0[2]);
    out[0] += w2 + w3;
    out[1] += w2 + w3;
    out[2] += e.A2 * w2 + e.A3 * w3;
    return out;
}

double Fluorescence::sandwich_z(double tau) const {
    const double y2 = Y_ * Y_;
    const cplx ring = std::exp(-0.75 * gamma_ * tau) *
                      (std::cosh(delta_ * tau) + 0.75 * gamma_ * tau * sinhc(delta_ * tau));
    return -0.5 * y2 / ((1.0 + y2) * (1.0 + y2)) * (1.0 + y2 * ring.real());
}

double Fluorescence::sandwich_pm(double tau) const {
    const double y2 = Y_ * Y_;
    const cplx decay = std::exp(-0.75 * gamma_ * tau);
    const cplx ring = decay * (std::cosh(delta_ * tau) + 0.75 * gamma_ * tau * sinhc(delta_ * tau));
    const cplx shift = decay * (gamma_ / 4.0) * tau * sinhc(delta_ * tau);
    return -Y_ * y2 / (2.0 * sqrt2 * (1.0 + y2) * (1.0 + y2)) * (1.0 - ring.real()) -
           Y_ * y2 / (sqrt2 * (1.0 + y2)) * shift.real();
}

double Fluorescence::g2(double tau) const {
    const cplx ring = std::exp(-0.75 * gamma_ * tau) *
                      (std::cosh(delta_ * tau) + 0.75 * gamma_ * tau * sinhc(delta_ * tau));
    return 1.0 - ring.real();
}

cplx Fluorescence::incoherent_complex(double w) const {
    const double y2 = Y_ * Y_;
    const cplx x = 2.0 * delta_ / gamma_;
    const cplx body = (1.0 + y2) / y2 / (1.0 + w * w) - (1.0 / y2 - 1.0) * 0.5 * lor_sum(1.5, x, w) -
                      (1.0 / y2 - 5.0) * 0.25 * lor_diff(1.5, x, w);
    return body / (2.0 * pi);
}

cplx Fluorescence::incoherent_three_lorentzian(double w) const {
    const double y2 = Y_ * Y_;
    const cplx x = 2.0 * delta_ / gamma_;
    const cplx lower = 1.5 - x;
    const cplx upper = 1.5 + x;
    const cplx body = (1.0 + y2) / y2 / (1.0 + w * w) -
                      (1.0 / y2 - 1.0 + (1.0 / y2 - 5.0) / (2.0 * x)) * (0.75 - x / 2.0) / (lower * lower + w * w) -
                      (1.0 / y2 - 1.0 - (1.0 / y2 - 5.0) / (2.0 * x)) * (0.75 + x / 2.0) / (upper * upper + w * w);
    return body / (2.0 * pi);
}

double Fluorescence::transform_pm(double w) const {
    const double y2 = Y_ * Y_;
    const double pre = y2 / ((1.0 + y2) * (1.0 + y2));
    const cplx x = 2.0 * delta_ / gamma_;
    const cplx pair = (1.0 - y2) * lor_sum(1.5, x, w) + 0.5 * (1.0 - 5.0 * y2) * lor_diff(1.5, x, w);
    return 0.25 * y2 / (1.0 + y2) / (1.0 + w * w) - pre / 8.0 * pair.real();
}

double Fluorescence::transform_pp(double w) const {
    const double y2 = Y_ * Y_;
    return transform_pm(w) - 0.5 * y2 / (1.0 + y2) / (1.0 + w * w);
}

double incoherent_spectrum_critical(double w) {
    const double w2 = w * w;
    const double d = 2.25 + w2;
    return 9.0 / (2.0 * pi) * (1.0 / (1.0 + w2) - (3.0 + w2) / (d * d));
}

Spectrum incoherent_spectrum(const SystemParams& p, const std::vector<double>& omega, double omega_A) {
    const Fluorescence f = Fluorescence::external(p);
    Spectrum s;
    s.omega = omega;
    s.norm = SpectrumNorm::unit_area;
    s.values.reserve(omega.size());
    for (double w : omega) s.values.push_back(f.incoherent(w - omega_A));
    return s;
}

double forwards_fluctuation_intensity(const SystemParams& p) {
    const double Y = derive(p).Y;
    const double y2 = Y * Y;
    return p.focusing * p.gamma / 2.0 * 0.5 * y2 * y2 / ((1.0 + y2) * (1.0 + y2));
}

Spectrum squeezing_spectrum(const SystemParams& p, double theta, const std::vector<double>& omega,
                            bool normalized) {
    const Fluorescence f = Fluorescence::external(p);
    const double scale = 8.0 * p.eta / pi * (p.focusing * p.gamma / 2.0);
    const double norm = normalized ? 16.0 * p.eta * forwards_fluctuation_intensity(p) : 1.0;
    const double c2 = std::cos(2.0 * theta);
    Spectrum s;
    s.omega = omega;
    s.norm = normalized ? SpectrumNorm::normalized : SpectrumNorm::raw;
    s.values.reserve(omega.size());
    for (double w : omega) s.values.push_back(scale * (f.transform_pm(w) + c2 * f.transform_pp(w)) / norm);
    return s;
}

std::pair<double, double> quadrature_variances(const SystemParams& p) {
    const double Y = derive(p).Y;
    const double y2 = Y * Y;
    const double pre = 0.25 * (p.focusing * p.gamma / (4.0 * p.kappa)) * y2 / ((1.0 + y2) * (1.0 + y2));
    return {pre * (y2 - 1.0), pre * (y2 + 1.0)};
}

double quadrature_correlation(const SystemParams& p, double tau) {
    const Fluorescence f = Fluorescence::external(p);
    return 0.5 * (p.focusing * p.gamma / (4.0 * p.kappa)) * (f.corr_pp(tau) + f.corr_pm(tau));
}

double forwards_flux_analytic(const SystemParams& p) {
    if (!(p.focusing > 0.0)) return 2.0 * p.eps_d * p.eps_d / p.kappa;
    const double Y = derive(p).Y;
    const double y2 = Y * Y;
    const double one_minus = 1.0 - p.focusing;
    return p.gamma / (4.0 * p.focusing) * y2 / (1.0 + y2) * (one_minus * one_minus + y2);
}

std::vector<double> g2_forwards_weak(const SystemParams& p, const std::vector<double>& tau) {
    p.validate();
    const double r = 2.0 * mapping_cooperativity(p.focusing);
    std::vector<double> out;
    out.reserve(tau.size());
    for (double t : tau) {
        const double b = 1.0 - r * r * std::exp(-0.5 * p.gamma * t);
        out.push_back(b * b);
    }
    return out;
}

double g2_forwards_weak_minimum(const SystemParams& p) {
    mapping_cooperativity(p.focusing);
    return 4.0 * std::log(p.focusing / (1.0 - p.focusing)) / p.gamma;
}

std::vector<double> g2_forwards_badcavity(const SystemParams& p, const std::vector<double>& tau) {
    const DerivedParams d = derive(p, true);
    const double C = *d.coop_C;
    const double y2 = d.Y * d.Y;
    const double s = 1.0 + 2.0 * C;
    const double denom = 1.0 + y2 * s * s;
    const double amp = -8.0 * C * C / (denom * denom);
    const double wc = 1.0 - 2.0 * C * C - y2 * s * s;
    const double ws = 1.0 + 2.0 * C * C - y2 * s * (5.0 + 2.0 * C);
    std::vector<double> out;
    out.reserve(tau.size());
    for (double t : tau) {
        const cplx body = std::exp(-0.75 * p.gamma * t) *
                          (wc * std::cosh(d.delta * t) + (p.gamma / 4.0) * ws * t * sinhc(d.delta * t));
        out.push_back(1.0 + amp * body.real());
    }
    return out;
}

std::vector<double> g2_sideways(double gamma, double Y, const std::vector<double>& tau) {
    const cplx delta = bloch_shift(gamma, Y);
    std::vector<double> out;
    out.reserve(tau.size());
    for (double t : tau) {
        const cplx ring = std::exp(-0.75 * gamma * t) * (std::cosh(delta * t) + 0.75 * gamma * t * sinhc(delta * t));
        out.push_back(1.0 - ring.real());
    }
    return out;
}

std::vector<double> g2_sideways(const SystemParams& p, const std::vector<double>& tau) {
    return g2_sideways(p.gamma, derive(p).Y, tau);
}

std::vector<double> g2_ss_freespace(const SystemParams& p, const std::vector<double>& tau) {
    const Fluorescence f = Fluorescence::external(p);
    std::vector<double> out;
    out.reserve(tau.size());
    for (double t : tau) out.push_back(f.g2(t));
    return out;
}

}  // namespace cqed
