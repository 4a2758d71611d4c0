#pragma once

// The planar Gaussian analytic function F(z) = sum zeta_k z^k / sqrt(k!),
// its normalised modulus field X = log|F(z) e^{-|z|^2/2}| + gamma/2, zero
// extraction, and smooth linear statistics of the zero set.

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fieldsim/field.hpp"
#include "fieldsim/lattice.hpp"

namespace fieldsim {

struct GefCoefficients {
    std::vector<std::complex<double>> zeta;  // zeta_0 .. zeta_N
    std::uint64_t seed = 0;

    int order() const { return static_cast<int>(zeta.size()) - 1; }
};

// zeta_k iid standard complex Gaussian (E|zeta|^2 = 1, E zeta^2 = 0),
// reproducible in (seed, stream).
GefCoefficients sample_gef(int order, std::uint64_t seed,
                           std::uint64_t stream = 0);

// Smallest N with the mean squared truncation tail of F* on |z| <= R below
// tol; equals the upper-tail quantile of a Poisson(R^2) law.
int truncation_order(double radius, double tol);

// F*(z) = F(z) e^{-|z|^2/2} by a damped term recurrence: no intermediate
// over/underflow for |z| <= 36.  Throws std::domain_error beyond that range.
std::complex<double> eval_fstar(const GefCoefficients& coeffs,
                                std::complex<double> z);

// X at one point; `singular` marks |F*| < 1e-300 where the log diverges.
struct XValue {
    double value = 0.0;
    bool singular = false;
};
XValue log_field_value(const GefCoefficients& coeffs, std::complex<double> z);

// X sampled over a lattice with the singular-node mask and count.
struct XField {
    FieldGrid grid;
    std::vector<std::uint8_t> singular;
    std::size_t singular_count = 0;
};
XField field_X(const GefCoefficients& coeffs, const Lattice& lattice);

struct ZeroFindingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WindingMismatchError : ZeroFindingError {
    using ZeroFindingError::ZeroFindingError;
};

struct ZeroSet {
    std::vector<std::complex<double>> zeros;  // |z| <= reliable_radius
    double reliable_radius = 0.0;
    long winding = 0;  // contour count on |z| = reliable_radius
};

// All zeros of the coefficient polynomial with |z| <= radius, refined to
// residual |F*| < 1e-10 and cross-checked against the winding number on the
// boundary circle.  Requires coefficients of order at least
// truncation_order(radius + 2, 1e-12); zeros found outside the radius are
// discarded.  Throws WindingMismatchError when the contour count disagrees
// with the located roots.
ZeroSet find_zeros(const GefCoefficients& coeffs, double radius);

// Radial compactly supported C^2 test profile with closed-form Laplacian and
// precomputed norms.
struct TestFunction {
    std::string kind;
    std::function<double(double)> profile;            // h(rho), rho = |z|
    std::function<double(double)> laplacian_profile;  // (Laplacian h)(rho)
    double support_radius = 1.0;
    double integral = 0.0;       // int h
    double norm_sq = 0.0;        // int h^2
    double laplacian_norm_sq = 0.0;  // int (Laplacian h)^2
};

// kind "cubic": h(z) = (1-|z|^2)^3 on |z| <= 1 (the default); factory
// validates the stored norms and int Laplacian h = 0 by quadrature to 1e-8.
TestFunction bump_test_function(const std::string& kind = "cubic");
TestFunction scale_test_function(const TestFunction& h, double factor);

// Raised when a statistic needs data outside the reliable/supplied region.
struct CoverageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LinearStatisticResult {
    double value = 0.0;
    double r = 0.0;
    double mean_term = 0.0;  // (r^2/pi) int h
    double deviation = 0.0;  // value - mean_term
};

// sum_j h(z_j / r) over the zero set.  Requires r * support_radius within the
// reliable radius.
LinearStatisticResult linear_statistic(const ZeroSet& zeros,
                                       const TestFunction& h, double r);

// Midpoint-rule value of (1 / (2 pi r^2)) int (Laplacian h)(z/r) X_z dz with
// singular nodes excluded and counted.  The lattice must cover the disk of
// radius r * support_radius with spacing <= r * support_radius / 50.
struct FieldStatisticResult {
    double value = 0.0;
    std::size_t singular_excluded = 0;
};
FieldStatisticResult field_statistic(const GefCoefficients& coeffs,
                                     const TestFunction& h, double r,
                                     const Lattice& lattice);

}  // namespace fieldsim
