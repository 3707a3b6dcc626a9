#pragma once

namespace isac::special {

/// Scaled complementary error function exp(x^2) erfc(x).
double erfcx(double x);

/// log(erfcx(x)), finite for all finite x.
double log_erfcx(double x);

}  // namespace isac::special
