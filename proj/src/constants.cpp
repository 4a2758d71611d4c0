#include "fieldsim/constants.hpp"

#include <cmath>
#include <numbers>

namespace fieldsim {
namespace {

// Kahan-compensated accumulator; the series below have ~1e3 terms and the
// tests require ~1e-13 relative accuracy.
struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

double compute_zeta3() {
    // Partial sum to N-1 plus the Euler-Maclaurin tail of x^-3 at N:
    //   1/(2N^2) + 1/(2N^3) + 1/(4N^4) - 1/(12N^6) + O(N^-8).
    constexpr int N = 100;
    Kahan acc;
    for (int k = N - 1; k >= 1; --k) {
        const double kk = static_cast<double>(k);
        acc.add(1.0 / (kk * kk * kk));
    }
    const double n = static_cast<double>(N);
    acc.add(1.0 / (2.0 * n * n));
    acc.add(1.0 / (2.0 * n * n * n));
    acc.add(1.0 / (4.0 * n * n * n * n));
    acc.add(-1.0 / (12.0 * n * n * n * n * n * n));
    return acc.sum;
}

double compute_euler_gamma() {
    // gamma = H_N - log N - 1/(2N) + 1/(12N^2) - 1/(120N^4) + O(N^-6).
    constexpr int N = 1000;
    Kahan acc;
    for (int k = N; k >= 1; --k) acc.add(1.0 / static_cast<double>(k));
    const double n = static_cast<double>(N);
    acc.add(-std::log(n));
    acc.add(-1.0 / (2.0 * n));
    acc.add(1.0 / (12.0 * n * n));
    acc.add(-1.0 / (120.0 * n * n * n * n));
    return acc.sum;
}

double dilog_of_exp_neg(double s) {
    // Li_2(e^-s) = sum_k e^{-ks}/k^2 for s > 0; geometric decay.
    Kahan acc;
    const double q = std::exp(-s);
    double qk = 1.0;
    for (int k = 1; k <= 800; ++k) {
        qk *= q;
        const double term = qk / (static_cast<double>(k) * k);
        acc.add(term);
        if (term < 1e-18 * (acc.sum + 1e-300)) break;
    }
    return acc.sum;
}

}  // namespace

double zeta3() {
    static const double v = compute_zeta3();
    return v;
}

double euler_gamma() {
    static const double v = compute_euler_gamma();
    return v;
}

double log_modulus_variance() {
    static const double v =
        std::numbers::pi * std::numbers::pi / 24.0;
    return v;
}

double log_modulus_covariance(double distance) {
    if (distance == 0.0) return log_modulus_variance();
    return 0.25 * dilog_of_exp_neg(distance * distance);
}

double sigma_x_sq() {
    static const double v = std::numbers::pi * zeta3() / 4.0;
    return v;
}

double sigma_x() {
    static const double v = std::sqrt(sigma_x_sq());
    return v;
}

double sigma_zero_sq() {
    static const double v = zeta3() / (16.0 * std::numbers::pi);
    return v;
}

double sigma_zero() {
    static const double v = std::sqrt(sigma_zero_sq());
    return v;
}

double beta_real() {
    static const double v = (euler_gamma() + std::numbers::ln2) / 2.0;
    return v;
}

}  // namespace fieldsim
