#pragma once

#include <functional>
#include <string>
#include <vector>

namespace cqed {

struct CheckResult {
    std::string id;
    std::string title;
    bool passed = false;
    std::string detail;  // residuals against their tolerances
    double seconds = 0.0;
};

struct ValidationOptions {
    /// Multiplies every tolerance; 0 makes every check fail (failure injection).
    double tolerance_scale = 1.0;
    int workers = 0;  // trajectory ensembles; 0 picks default_workers()

    // Bistability criterion.
    int bistability_n_fock = 260;
    int bistability_seeds = 4;
    double bistability_t_end = 200.0;
    double bistability_tolerance = 1e-2;
    int runtime_probe_n_fock = 100;  // budget reference for one 200/kappa trajectory
};

struct Check {
    std::string id;
    std::string title;
    bool fast = false;  // part of `validate --fast`
    std::function<CheckResult(const ValidationOptions&)> run;
};

/// Numerical invariants: trace, Hermiticity and positivity under propagation,
/// stationary-state validity, spectrum normalization, quadrature sign change.
std::vector<Check> invariant_checks();

/// The acceptance criteria A1 to A10, in order.
std::vector<Check> acceptance_checks();

/// Oracle suite run by `validate`: the invariants plus every analytic-versus-
/// numeric criterion (the stochastic bistability criterion is excluded).
std::vector<Check> oracle_checks();

/// Runs `check`, timing it and turning library exceptions into a failure.
CheckResult run_check(const Check& check, const ValidationOptions& opts);

}  // namespace cqed
