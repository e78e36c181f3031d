#include "cqed/series.hpp"

#include "cqed/errors.hpp"

namespace cqed {

std::string_view to_string(CorrelationKind kind) {
    switch (kind) {
        case CorrelationKind::first_order_pm: return "first_order_pm";
        case CorrelationKind::first_order_pp: return "first_order_pp";
        case CorrelationKind::second_order_C1: return "second_order_C1";
        case CorrelationKind::second_order_C2: return "second_order_C2";
        case CorrelationKind::quadrature: return "quadrature";
        case CorrelationKind::generic: return "generic";
    }
    return "generic";
}

std::string_view to_string(SpectrumNorm norm) {
    switch (norm) {
        case SpectrumNorm::unit_area: return "unit_area";
        case SpectrumNorm::raw: return "raw";
        case SpectrumNorm::normalized: return "normalized";
    }
    return "raw";
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 2) throw InvalidArgument("linspace needs at least two points");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    out.back() = b;
    return out;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw InvalidArgument("trapezoid: size mismatch");
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return sum;
}

}  // namespace cqed
