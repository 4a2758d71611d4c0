#pragma once

// Error-free floating-point transformations and expansion arithmetic
// (Shewchuk-style).  An expansion represents a real number exactly as a sum
// of non-overlapping doubles; sums and products of doubles are closed under
// these operations, so cancellation identities can be checked with zero
// tolerance.

#include <vector>

namespace fieldsim {

// Sum of doubles held exactly; components ordered by increasing magnitude.
using Expansion = std::vector<double>;

// a + b = result.first + result.second exactly (two_sum), likewise a - b.
struct ErrFree {
    double value;
    double err;
};
ErrFree two_sum(double a, double b);
ErrFree two_diff(double a, double b);
// a * b exactly (uses fused multiply-add).
ErrFree two_prod(double a, double b);

Expansion expansion_from(double x);
// e + x exactly.
Expansion grow_expansion(const Expansion& e, double x);
// e + f exactly.
Expansion expansion_sum(const Expansion& e, const Expansion& f);
Expansion expansion_negate(const Expansion& e);
// e * x exactly.
Expansion expansion_scale(const Expansion& e, double x);

// Sign of the represented value: -1, 0, +1.
int expansion_sign(const Expansion& e);
// Nearest-double approximation of the represented value.
double expansion_estimate(const Expansion& e);

}  // namespace fieldsim
