#pragma once

namespace dam {

// Exponential integral E1(x) = int_x^inf exp(-t)/t dt, x > 0.
// Power series below 1, continued fraction above; relative error ~1e-14.
double expint_e1(double x);

} // namespace dam
