#include "fieldsim/exact.hpp"

#include <cmath>

namespace fieldsim {

ErrFree two_sum(double a, double b) {
    const double s = a + b;
    const double bv = s - a;
    const double av = s - bv;
    return {s, (a - av) + (b - bv)};
}

ErrFree two_diff(double a, double b) {
    const double s = a - b;
    const double bv = a - s;
    const double av = s + bv;
    return {s, (a - av) - (b - bv)};
}

ErrFree two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

Expansion expansion_from(double x) {
    if (x == 0.0) return {};
    return {x};
}

Expansion grow_expansion(const Expansion& e, double x) {
    Expansion out;
    out.reserve(e.size() + 1);
    double q = x;
    for (const double c : e) {
        const auto [s, err] = two_sum(q, c);
        q = s;
        if (err != 0.0) out.push_back(err);
    }
    if (q != 0.0) out.push_back(q);
    return out;
}

Expansion expansion_sum(const Expansion& e, const Expansion& f) {
    Expansion out = e;
    for (const double c : f) out = grow_expansion(out, c);
    return out;
}

Expansion expansion_negate(const Expansion& e) {
    Expansion out = e;
    for (double& c : out) c = -c;
    return out;
}

Expansion expansion_scale(const Expansion& e, double x) {
    Expansion out;
    for (const double c : e) {
        const auto [p, err] = two_prod(c, x);
        if (err != 0.0) out = grow_expansion(out, err);
        if (p != 0.0) out = grow_expansion(out, p);
    }
    return out;
}

int expansion_sign(const Expansion& e) {
    if (e.empty()) return 0;
    const double top = e.back();
    return (top > 0.0) - (top < 0.0);
}

double expansion_estimate(const Expansion& e) {
    double s = 0.0;
    for (const double c : e) s += c;
    return s;
}

}  // namespace fieldsim
