#include "cqed/meanfield.hpp"

#include "cqed/errors.hpp"

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace cqed {

void MeanFieldState::check() const {
    constexpr double slack = 1e-9;
    if (std::abs(zeta1) > 1.0 + slack || std::abs(zeta2) > 1.0 + slack)
        throw InvalidArgument("mean-field state: |zeta| exceeds 1");
    if (std::abs(beta1) > 0.5 + slack || std::abs(beta2) > 0.5 + slack)
        throw InvalidArgument("mean-field state: |beta| exceeds 1/2");
    if (!std::isfinite(std::abs(alpha))) throw InvalidArgument("mean-field state: alpha not finite");
}

MeanFieldState meanfield_rhs(const SystemParams& p, const MeanFieldState& s) {
    const double c = std::sqrt(p.kappa * p.gamma * p.focusing);
    MeanFieldState d;
    d.alpha = -p.kappa * s.alpha + p.g * s.beta1 + p.eps_d;
    d.beta1 = -0.5 * p.gamma_s * s.beta1 + p.g * s.alpha * s.zeta1;
    d.zeta1 = -p.gamma_s * (s.zeta1 + 1.0) - 4.0 * p.g * std::real(std::conj(s.alpha) * s.beta1);
    d.beta2 = -0.5 * p.gamma * s.beta2 + c * s.alpha * s.zeta2;
    d.zeta2 = -p.gamma * (s.zeta2 + 1.0) - 4.0 * c * std::real(std::conj(s.alpha) * s.beta2);
    return d;
}

double meanfield_residual(const SystemParams& p, const MeanFieldState& s) {
    const MeanFieldState d = meanfield_rhs(p, s);
    return std::max({std::abs(d.alpha), std::abs(d.beta1), std::abs(d.zeta1), std::abs(d.beta2),
                     std::abs(d.zeta2)});
}

namespace {

Eigen::VectorXd pack(const MeanFieldState& s) {
    Eigen::VectorXd x(8);
    x << s.alpha.real(), s.alpha.imag(), s.beta1.real(), s.beta1.imag(), s.zeta1, s.beta2.real(),
        s.beta2.imag(), s.zeta2;
    return x;
}

MeanFieldState unpack(const Eigen::VectorXd& x) {
    return {{x(0), x(1)}, {x(2), x(3)}, x(4), {x(5), x(6)}, x(7)};
}

}  // namespace

std::vector<MeanFieldState> integrate_meanfield(const SystemParams& p, const MeanFieldState& initial,
                                                const std::vector<double>& times,
                                                const MeanFieldOptions& opts) {
    namespace ode = boost::numeric::odeint;
    using State = Eigen::VectorXd;
    p.validate();
    initial.check();
    if (times.empty()) return {};
    if (times.front() < 0.0) throw InvalidArgument("mean field: negative time");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) throw InvalidArgument("mean field: times must be strictly increasing");

    const bool project = opts.project_pseudo_spin && p.gamma_s == 0.0 && initial.pseudo_spin1() > 0.0;
    const double radius = std::sqrt(initial.pseudo_spin1());
    const auto restore = [&](State& x) {
        const double r = std::sqrt(4.0 * (x(2) * x(2) + x(3) * x(3)) + x(4) * x(4));
        if (r > 0.0) {
            const double f = radius / r;
            x(2) *= f;
            x(3) *= f;
            x(4) *= f;
        }
    };
    const auto rhs = [&p](const State& x, State& dx, double) { dx = pack(meanfield_rhs(p, unpack(x))); };

    using Stepper = ode::runge_kutta_dopri5<State, double, State, double, ode::vector_space_algebra>;
    auto stepper = ode::make_controlled(opts.abs_tol, opts.rel_tol, Stepper());
    const double span = times.back();
    State x = pack(initial);
    State dxdt(8);
    rhs(x, dxdt, 0.0);
    double t = 0.0;
    double dt = 1e-4 * span;
    std::vector<MeanFieldState> out;
    out.reserve(times.size());
    for (const double target : times) {
        while (t < target) {
            const bool last = dt >= target - t;
            double h = last ? target - t : dt;
            if (stepper.try_step(rhs, x, dxdt, t, h) == ode::success) {
                if (project) {
                    restore(x);
                    rhs(x, dxdt, t);
                }
                if (last) t = target;
                dt = last ? std::max(dt, h) : h;
            } else {
                dt = h;
                if (!(dt >= 1e-12 * span)) {
                    throw StiffnessFailure("mean field: step size collapsed at t = " + std::to_string(t));
                }
            }
        }
        out.push_back(unpack(x));
    }
    return out;
}

AdiabaticSteadyState adiabatic_steady_state(const SystemParams& p) {
    const DerivedParams d = derive(p);
    AdiabaticSteadyState s;
    s.Y_bar = d.Y_bar;
    s.Y_prime = d.Y_prime;
    s.Y_pp = d.Y_pp;
    s.Y_pp_limit = d.Y_pp_limit;
    std::tie(s.beta1, s.zeta1) = resonance_fluorescence_state(cplx(d.Y_prime, 0.0));
    std::tie(s.beta2, s.zeta2) = resonance_fluorescence_state(cplx(d.Y_pp, 0.0));
    s.bad_cavity = p.kappa >= 10.0 * std::max({p.eps_d, p.g, 0.5 * p.gamma_s});
    return s;
}

std::array<cplx, 4> adiabatic_rhs(const SystemParams& p, const AdiabaticSteadyState& s) {
    // Internal atom: decay (gamma_s/2)(1 + 2C) = gamma_s/2 + g^2/kappa, drive g eps_d / kappa.
    const double damp = 0.5 * p.gamma_s + p.g * p.g / p.kappa;
    const double drive1 = p.g * p.eps_d / p.kappa;
    const cplx d_beta1 = -damp * s.beta1 + drive1 * s.zeta1;
    const cplx d_zeta1 = -2.0 * damp * (s.zeta1 + 1.0) - 4.0 * drive1 * s.beta1.real();
    // External atom driven by eps_d + g <s1->, with moments factorized.
    const double c = std::sqrt(p.gamma * p.focusing / p.kappa);
    const cplx field = p.eps_d + p.g * s.beta1;
    const cplx d_beta2 = -0.5 * p.gamma * s.beta2 + c * field * s.zeta2;
    const cplx d_zeta2 = -p.gamma * (s.zeta2 + 1.0) - 4.0 * c * std::real(std::conj(field) * s.beta2);
    return {d_beta1, d_zeta1, d_beta2, d_zeta2};
}

Eigen::Matrix<double, 8, 8> meanfield_jacobian(const SystemParams& p, const MeanFieldState& s) {
    // The right-hand side is quadratic, so central differences are exact up to rounding.
    const Eigen::VectorXd x = pack(s);
    Eigen::Matrix<double, 8, 8> J;
    for (int i = 0; i < 8; ++i) {
        const double h = 1e-3 * std::max(1.0, std::abs(x(i)));
        Eigen::VectorXd up = x, dn = x;
        up(i) += h;
        dn(i) -= h;
        J.col(i) = (pack(meanfield_rhs(p, unpack(up))) - pack(meanfield_rhs(p, unpack(dn)))) / (2.0 * h);
    }
    return J;
}

std::array<MeanFieldBranch, 2> meanfield_branches(const SystemParams& p) {
    std::array<MeanFieldBranch, 2> out;
    for (int i = 0; i < 2; ++i) {
        const NeoclassicalAtoms a = neoclassical_atoms(p, i == 0 ? Branch::Plus : Branch::Minus);
        MeanFieldBranch& b = out[static_cast<std::size_t>(i)];
        b.state = {a.alpha, a.beta1, a.zeta1, a.beta2, a.zeta2};
        b.residual = meanfield_residual(p, b.state);
        const Eigen::EigenSolver<Eigen::Matrix<double, 8, 8>> es(meanfield_jacobian(p, b.state), false);
        b.growth_rate = es.eigenvalues().real().maxCoeff();
    }
    return out;
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("power-law fit needs matching data");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("power-law fit needs positive data");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(x.size());
    const double den = n * sxx - sx * sx;
    if (!(den > 0.0)) throw InvalidArgument("power-law fit needs distinct abscissae");
    PowerLawFit f;
    f.exponent = (n * sxy - sx * sy) / den;
    f.prefactor = std::exp((sy - f.exponent * sx) / n);
    f.points = static_cast<int>(x.size());
    return f;
}

CriticalScaling critical_scaling(const std::vector<SystemParams>& sweep, double min_Y) {
    constexpr int min_points = 8;
    CriticalScaling r;
    std::vector<double> xf, yf, xl, yb, yz;
    for (const SystemParams& p : sweep) {
        if (!(p.g > 0.0) || p.eps_d < p.g / 2.0) continue;  // below threshold: no bimodal branch
        const NeoclassicalAtoms a = neoclassical_atoms(p, Branch::Plus);
        ScalingPoint pt;
        pt.lambda = std::pow(p.g / (2.0 * p.eps_d), 2);
        pt.Y = std::abs(drive_amplitude(p, a.alpha));
        pt.im_alpha = std::abs(a.alpha.imag());
        pt.abs_beta1 = std::abs(a.beta1);
        pt.zeta1 = a.zeta1;
        pt.abs_beta2 = std::abs(a.beta2);
        pt.abs_zeta2 = std::abs(a.zeta2);
        r.points.push_back(pt);
        r.max_abs_zeta1 = std::max(r.max_abs_zeta1, std::abs(pt.zeta1));
        r.max_beta1_deviation = std::max(r.max_beta1_deviation, std::abs(pt.abs_beta1 - 0.5));

        const double dist = 1.0 - pt.lambda;
        if (dist > 0.0) {
            xf.push_back(dist);
            yf.push_back(pt.im_alpha);
            if (pt.Y >= min_Y) {
                xl.push_back(dist);
                yb.push_back(pt.abs_beta2);
                yz.push_back(pt.abs_zeta2);
            }
        }
    }
    if (static_cast<int>(xf.size()) < min_points) {
        throw InsufficientWindow("critical scaling: " + std::to_string(xf.size()) +
                                 " points above threshold, need " + std::to_string(min_points));
    }
    if (static_cast<int>(xl.size()) < min_points) {
        throw InsufficientWindow("critical scaling: " + std::to_string(xl.size()) +
                                 " points with |Y| >= " + std::to_string(min_Y) + ", need " +
                                 std::to_string(min_points));
    }
    r.field = fit_power_law(xf, yf);
    r.beta2 = fit_power_law(xl, yb);
    r.zeta2 = fit_power_law(xl, yz);
    return r;
}

}  // namespace cqed
