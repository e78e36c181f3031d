#pragma once

#include "cqed/params.hpp"

#include <string_view>
#include <vector>

namespace cqed {

enum class CorrelationKind {
    first_order_pm,   // <dA+(0) dA-(tau)>
    first_order_pp,   // <dA+(0) dA+(tau)>
    second_order_C1,  // unnormalized <C1+ C1+(tau) C1(tau) C1>
    second_order_C2,
    quadrature,
    generic,
};

std::string_view to_string(CorrelationKind kind);

struct CorrelationSeries {
    std::vector<double> tau;
    std::vector<cplx> values;
    CorrelationKind kind = CorrelationKind::generic;
};

enum class SpectrumNorm { unit_area, raw, normalized };

std::string_view to_string(SpectrumNorm norm);

/// Frequencies are in units of gamma/2 relative to the atomic resonance.
struct Spectrum {
    std::vector<double> omega;
    std::vector<double> values;
    SpectrumNorm norm = SpectrumNorm::raw;
};

std::vector<double> linspace(double a, double b, int n);

/// Trapezoid rule on a possibly non-uniform grid.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cqed
