#pragma once

#include "cqed/errors.hpp"

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include <string>
#include <vector>

namespace cqed::detail {

/// Adaptive Dormand-Prince integration of a real system from t = 0, reporting
/// the interpolated state at each of the strictly increasing, non-negative
/// `times`. Throws StiffnessFailure once the step drops below 1e-12 of the span.
template <class Rhs, class Sink>
void integrate_dense(const Rhs& rhs, const Eigen::VectorXd& x0, const std::vector<double>& times,
                     double abs_tol, double rel_tol, const Sink& sink, const char* what) {
    namespace ode = boost::numeric::odeint;
    using State = Eigen::VectorXd;
    if (times.empty()) return;
    if (times.front() < 0.0) throw InvalidArgument(std::string(what) + ": negative time");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw InvalidArgument(std::string(what) + ": times must be strictly increasing");

    std::size_t k = 0;
    for (; k < times.size() && times[k] == 0.0; ++k) sink(k, x0);
    if (k == times.size()) return;

    const double span = times.back();
    using Stepper = ode::runge_kutta_dopri5<State, double, State, double, ode::vector_space_algebra>;
    auto stepper = ode::make_dense_output(abs_tol, rel_tol, Stepper());
    stepper.initialize(x0, 0.0, 1e-4 * span);
    const auto system = [&rhs](const State& s, State& ds, double t) {
        ds.resize(s.size());
        rhs(s, ds, t);
    };

    State out(x0.size());
    for (; k < times.size(); ++k) {
        while (stepper.current_time() < times[k]) {
            try {
                stepper.do_step(system);
            } catch (const ode::odeint_error& e) {
                throw StiffnessFailure(std::string(what) + ": " + e.what());
            }
            if (!(stepper.current_time_step() >= 1e-12 * span)) {
                throw StiffnessFailure(std::string(what) + ": step size collapsed at t = " +
                                       std::to_string(stepper.current_time()));
            }
        }
        stepper.calc_state(times[k], out);
        sink(k, out);
    }
}

}  // namespace cqed::detail
