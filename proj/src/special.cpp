#include "isac/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace isac::special {

namespace {

// Asymptotic expansion, accurate to double precision for x >= 25.
double erfcx_large(double x) {
    const double z = 1.0 / (2.0 * x * x);
    double term = 1.0, sum = 1.0;
    for (int n = 1; n < 40; ++n) {
        term *= -(2.0 * n - 1.0) * z;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum / (x * std::sqrt(std::numbers::pi));
}

double erfcx_nonneg(double x) {
    if (x < 25.0) return std::exp(x * x) * std::erfc(x);
    return erfcx_large(x);
}

}  // namespace

double erfcx(double x) {
    if (std::isnan(x)) return x;
    if (x >= 0.0) return erfcx_nonneg(x);
    if (x < -26.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::exp(x * x) - erfcx_nonneg(-x);
}

double log_erfcx(double x) {
    if (x >= 0.0) return std::log(erfcx_nonneg(x));
    // erfcx(x) = exp(x^2) (2 - exp(-x^2) erfcx(-x)) for negative x
    const double x2 = x * x;
    return x2 + std::log(2.0 - std::exp(-x2) * erfcx_nonneg(-x));
}

}  // namespace isac::special
