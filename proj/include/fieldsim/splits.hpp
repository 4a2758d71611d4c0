#pragma once

// Coupled noise families that agree on half-lines / quadrants: a 1D triple
// glued across the origin, a 2D family indexed by sign labels built from four
// independent corner noises, the convolved field families they induce, the
// leak fields measuring cross-boundary influence, and exponential-moment
// estimators for the integrated leak sizes.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fieldsim/kernel.hpp"
#include "fieldsim/lattice.hpp"
#include "fieldsim/noise.hpp"

namespace fieldsim {

// Coordinate sign convention used throughout: -1 for t < 0, +1 for t >= 0.
int coordinate_sign(double t);

// "First non-zero": a when a != 0, else b.  Arguments must lie in {-1,0,+1}.
int fnz(int a, int b);

// --- 1D split -------------------------------------------------------------

// (w0, wm, wp): wm, wp independent noises on the full line; w0 glued
// pathwise from wm on t < 0 and wp on t >= 0.
struct SplitTriple1D {
    Lattice lattice;
    bool complex_noise = false;
    std::uint64_t seed = 0;
    NoiseGrid zero, minus, plus;
};

SplitTriple1D split_noise_1d(const Lattice& lattice, bool complex_noise,
                             std::uint64_t seed, std::uint64_t stream = 0);

// --- 2D two-fold split ----------------------------------------------------

// Four independent corner noises indexed by (a, b) in {-1,+1}^2; the full
// nine-member family w^{alpha,beta}, alpha,beta in {-1,0,+1}, is assembled
// pointwise via w^{alpha,beta}_t = corner(fnz(alpha, sgn t1), fnz(beta, sgn t2))_t.
struct TwoSplitNoise {
    Lattice lattice;
    bool complex_noise = false;
    std::uint64_t seed = 0;
    std::array<NoiseGrid, 4> corners;  // index corner_index(a, b)

    static std::size_t corner_index(int a, int b);
    const NoiseGrid& corner(int a, int b) const;

    // Assembled member grid (exact element copies of corner values).
    NoiseGrid member(int alpha, int beta) const;
};

TwoSplitNoise two_split_noise(const Lattice& lattice, bool complex_noise,
                              std::uint64_t seed, std::uint64_t stream = 0);

// --- Convolved split families --------------------------------------------

// The nine convolved fields G^{alpha,beta} = kernel * w^{alpha,beta},
// evaluated at the nodes of eval_lattice with a shared window geometry so
// that cross-member comparisons see identical summation orders.
struct SplitFields {
    Lattice noise_lattice;
    Lattice eval_lattice;
    KernelSpec kernel;
    bool complex_valued = false;
    std::array<std::vector<std::complex<double>>, 9> members;

    static std::size_t member_index(int alpha, int beta);
    const std::vector<std::complex<double>>& member(int alpha, int beta) const;
};

SplitFields synthesize_split_fields(const KernelSpec& kernel,
                                    const TwoSplitNoise& noise,
                                    const Lattice& eval_lattice,
                                    double tail_tol = 1e-6);

// Leak fields, assembled pathwise from the member fields with the fixed
// reference label 0 for the untouched direction:
//   leak1(t)  = G^{sgn t1, 0} - G^{0,0}
//   leak2(t)  = G^{0, sgn t2} - G^{0,0}
//   leak12(t) = (G^{sgn t1, sgn t2} - G^{0, sgn t2})
//             - (G^{sgn t1, 0} - G^{0,0})   [canonical order]
struct LeakFields {
    Lattice lattice;
    bool complex_valued = false;
    std::vector<std::complex<double>> leak1, leak2, leak12;
};

LeakFields leak_fields(const SplitFields& fields);
LeakFields leak_fields(const KernelSpec& kernel, const TwoSplitNoise& noise,
                       const Lattice& eval_lattice, double tail_tol = 1e-6);

// --- Leak kernels ---------------------------------------------------------

// Closed-form kernels whose stationary convolution reproduces the leak laws:
//   which=1 : sqrt(2) (sgn t1) phi(t,s) when sgn s1 = -sgn t1, else 0
//   which=2 : sqrt(2) (sgn t2) phi(t,s) when sgn s2 = -sgn t2, else 0
//   which=12: 2 (sgn t1)(sgn t2) phi(t,s) when both signs opposite, else 0
struct LeakKernel {
    int which = 1;  // 1, 2, or 12
    KernelSpec base;

    std::complex<double> evaluate(std::array<double, 2> t,
                                  std::array<double, 2> s) const;
};

LeakKernel leak_kernel(const KernelSpec& kernel, int which);

// Covariance of the leak field at two points by direct quadrature of
// int leak_kernel(t, s) conj(leak_kernel(u, s)) ds over the plane.
double leak_covariance_quadrature(const LeakKernel& kernel,
                                  std::array<double, 2> t,
                                  std::array<double, 2> u);

// --- Pointwise transforms -------------------------------------------------

struct PointwiseMap {
    std::string name;
    std::function<std::complex<double>(std::complex<double>)> f;
    double lipschitz = 0.0;  // 0 when no finite global constant is claimed
    std::function<bool(std::complex<double>)> singular_at;  // may be empty
};

PointwiseMap identity_map();
PointwiseMap half_map();               // x/2, Lipschitz 1/2, exact in floating point
PointwiseMap abs_map();                // |x| (real fields), Lipschitz 1, exact
PointwiseMap clamp_map(double bound);  // clamp to [-bound, bound], Lipschitz 1
PointwiseMap log_abs_map();            // log|x|, singular near 0, no global constant

// Transformed family Y^{alpha,beta} = psi(G^{alpha,beta}) - m with one shared
// centering constant m (the node average of psi over the reference member).
// Leaks are recomputed from the transformed members; the transform of a
// G-leak is NOT a leak of the transformed family and is never used.
struct TransformedSplit {
    Lattice lattice;
    bool complex_valued = false;
    std::complex<double> center{0.0, 0.0};
    std::array<std::vector<std::complex<double>>, 9> members;  // centered
    std::vector<std::complex<double>> leak1, leak2, leak12;
    std::vector<std::uint8_t> singular;
    std::size_t singular_count = 0;

    const std::vector<std::complex<double>>& member(int alpha, int beta) const;
};

TransformedSplit apply_pointwise(const PointwiseMap& psi,
                                 const SplitFields& fields);

// --- Discrete 1D convolution of a split triple ----------------------------

// Finite signed kernel given as (node offset, weight) taps.
struct DiscreteKernel1D {
    std::vector<std::pair<long, double>> taps;
};

// Members convolved identically on the valid interior; leak recomputed from
// the convolved members.  `domination_ok` records the per-node check that
// |mu * (x_plus - x_zero)| <= |mu| * |x_plus - x_zero|, carried out in exact
// expansion arithmetic so rounding cannot produce spurious violations.
struct ConvolvedTriple {
    Lattice lattice;
    long valid_half_count = 0;
    std::vector<double> zero, minus, plus, leak;
    bool domination_ok = false;
};

ConvolvedTriple convolve_split(const DiscreteKernel1D& mu,
                               const SplitTriple1D& triple);

// --- Exponential moments --------------------------------------------------

// Sum of |field| * cell volume over nodes selected by the region predicate.
double region_integral(
    const std::vector<std::complex<double>>& values, const Lattice& lattice,
    const std::function<bool(std::array<double, 2>)>& region);

struct ExpMomentResult {
    double estimate = 0.0;
    double std_error = 0.0;
    int n = 0;
    bool heavy_tail = false;
    double top_share = 0.0;  // share of the mean carried by the top 1%
};

// Estimates E exp(c * S) from per-sample integrals S; requires >= 100
// samples.  Flags a heavy tail when the top 1% of samples carries more than
// half of the estimate.
ExpMomentResult exp_moment(std::span<const double> integrals, double c);

// --- Splittability verification -------------------------------------------

struct SplitCondition {
    std::string name;    // "a1".."a4"
    std::string region;  // human-readable region description
    double c_scale = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    double tail_bound = -1.0;  // exponent bias bound from region truncation; -1 unavailable
    int n = 0;
    bool heavy_tail = false;
    bool pass = false;
};

struct SplittabilityReport {
    std::array<SplitCondition, 4> conditions;
    double phase_residual = 0.0;  // shift-transport residual of the kernel
    bool phase_pass = false;
    bool all_pass = false;
};

// Monte Carlo estimates of E exp((1/C) * integral |.|) for the transformed
// member on [0,1)^2 (a1), the transformed 1-leak on R x [0,1) (a2), the
// transformed 2-leak on [0,1) x R (a3), and the transformed double leak on
// R^2 (a4); unbounded regions are truncated at the evaluation lattice and the
// truncation bias bound is reported.  Each estimate passes when <= 2.
SplittabilityReport verify_splittability_conditions(
    const KernelSpec& kernel, const PointwiseMap& psi, double c_scale,
    const Lattice& noise_lattice, const Lattice& eval_lattice, int n_samples,
    std::uint64_t seed);

}  // namespace fieldsim
