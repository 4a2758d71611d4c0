#pragma once

// Shift-smeared comparison machinery for pointwise maps of Gaussian fields.
//
// For a centred map psi and a Gaussian reference measure gamma_sigma, the
// smeared increment bound
//   g(y) = sup_h log int exp| psi((x+y)/2) - psi((x-y)/2) | dgamma_{h,sigma}(x)
// controls products of increment exponentials over independent coordinates.
// This header evaluates g on grids, fits power-law envelopes g(y) <= C |y|^p,
// checks the centering of candidate maps, and runs the two spectral /
// Monte-Carlo consistency checks that make the machinery usable on lattices:
// an eigenvalue test deciding whether lattice samples of a field are a noisy
// version of an i.i.d. Gaussian vector, and direct product-inequality
// simulations. A small analytic family with an explicit large-deviation
// profile exercises the sharpness of the bounds.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fieldsim/kernel.hpp"

namespace fieldsim {

// ---------------------------------------------------------------------------
// Candidate maps

enum class PsiDomain { Real, ComplexPlane };

// A pointwise map psi together with the reference measure it is centred
// against: the standard real Gaussian for Real, the standard complex
// Gaussian (E|zeta|^2 = 1, density pi^{-1} e^{-|z|^2}) for ComplexPlane.
// Real-domain maps receive arguments on the real axis.
struct PsiSpec {
    std::string name;
    PsiDomain domain = PsiDomain::Real;
    std::function<double(std::complex<double>)> map;
    double centering = 0.0;       // additive constant already folded into map
    double envelope_power = 1.0;  // declared growth exponent p in (0, 1]
    double lipschitz = -1.0;      // global Lipschitz constant; negative if none
    bool singular_at_zero = false;

    double operator()(std::complex<double> x) const { return map(x); }
};

// log|z| + gamma_Euler/2 on the complex plane; envelope power 1.
PsiSpec log_modulus_complex_psi();

// (1/2) log|u| + beta/2 on the real line; envelope power 1/2.
PsiSpec half_log_modulus_real_psi();

// log|u| + beta on the real line; envelope power 1.  The smeared bound for
// this map diverges: g(y) is infinite for every y != 0, and evaluation is
// expected to fail with NonconvergenceError.
PsiSpec log_modulus_real_psi();

// sin(u) on the real line; Lipschitz constant 1, envelope power 1.
PsiSpec sine_psi();

// psi scaled by a constant factor (factor * psi), keeping the domain and
// declared envelope power.  Used for the sub-homogeneity check
// g_{psi/m} <= g_psi / m for m >= 1.
PsiSpec scaled_psi(const PsiSpec& base, double factor);

// The centering constant beta = -int log|u| dgamma_R(u) of the real
// log-modulus maps.
double real_log_centering();

// ---------------------------------------------------------------------------
// Centering check

struct CenteringResult {
    double value = 0.0;           // int psi dgamma
    double error_estimate = 0.0;  // difference between two quadrature levels
    bool pass = false;            // |value| <= tolerance
};

// Integrates psi against its reference Gaussian and compares against zero.
CenteringResult centering_check(const PsiSpec& psi, double tolerance = 1e-9);

// ---------------------------------------------------------------------------
// The smeared increment bound g

// Quadrature resolution for the smeared integrals.  `order` is the
// Gauss-Legendre order per panel; refinement doubles it.  `span_sigmas` is
// the reach of the Gaussian bulk kept around each shift.
struct SmearedQuadrature {
    int order = 12;
    double span_sigmas = 7.0;
    double refine_rel_tol = 0.01;  // max relative drift between levels
};

struct NonconvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GValue {
    double value = 0.0;             // g(y) over the supplied shift grid
    double refinement_error = 0.0;  // |refined - base| / refined at the argmax
    std::complex<double> shift;     // maximising shift h
};

// Shift grids [-extent*sigma, extent*sigma] per axis with step step*sigma:
// a vector of reals for Real domain maps, a full planar grid for
// ComplexPlane maps (stored as complex numbers in both cases).
std::vector<std::complex<double>> make_shift_grid(PsiDomain domain,
                                                  double sigma,
                                                  double extent_sigmas = 6.0,
                                                  double step_sigmas = 0.25);

// One inner integral log int exp|psi((x+y)/2) - psi((x-y)/2)| dgamma_{h,sigma}
// at a fixed shift h.  Exposed for oracle tests.  Throws NonconvergenceError
// when the integral fails to converge (divergent map) and std::invalid_argument
// for domain mismatches (complex y or h supplied to a real-domain map).
double smeared_inner(const PsiSpec& psi, double sigma, std::complex<double> y,
                     std::complex<double> h,
                     const SmearedQuadrature& quad = {});

// g(y): supremum of smeared_inner over the shift grid, with a refinement
// check (doubled order) at the maximising shift.  g(0) = 0 exactly; values
// are nonnegative.  Throws NonconvergenceError when refinement drifts by
// more than refine_rel_tol or the integral diverges.
GValue g_of_y(const PsiSpec& psi, double sigma, std::complex<double> y,
              const std::vector<std::complex<double>>& shift_grid,
              const SmearedQuadrature& quad = {});

// ---------------------------------------------------------------------------
// Envelope fit over a grid of increments

struct GBoundResult {
    std::vector<double> y;       // increment magnitudes, ascending
    std::vector<double> g;       // g(y); +infinity when evaluation diverged
    std::vector<double> ratio;   // g(y) / y^p
    double fitted_constant = 0;  // max finite ratio
    double envelope_power = 1;   // p used for the ratios
    bool bounded = false;        // verdict: envelope C |y|^p holds on the grid
    double sigma = 1.0;
    int shift_count = 0;         // shifts searched per y
    int quadrature_order = 0;
};

// Evaluates g on an ascending grid of positive increments spanning at least
// three decades (y.back() / y.front() >= 1e3, else std::invalid_argument)
// and fits the envelope C |y|^p with p = psi.envelope_power.  The verdict is
// "bounded" unless the ratios blow up toward small y: the largest ratio
// sitting at one of the two smallest increments while exceeding 1.5 times
// the largest ratio elsewhere, or any evaluation diverging outright.
GBoundResult smeared_constant(const PsiSpec& psi,
                              const std::vector<double>& y_grid,
                              double sigma = 1.0,
                              const SmearedQuadrature& quad = {},
                              double shift_extent_sigmas = 6.0,
                              double shift_step_sigmas = 0.25);

// ---------------------------------------------------------------------------
// Lattice covariance and the noisy-Gaussian eigenvalue test

// Dense Hermitian matrix, row-major.
struct HermitianMatrix {
    int n = 0;
    std::vector<std::complex<double>> data;

    explicit HermitianMatrix(int size = 0)
        : n(size), data(static_cast<std::size_t>(size) * size) {}
    std::complex<double>& at(int j, int k) {
        return data[static_cast<std::size_t>(j) * n + k];
    }
    const std::complex<double>& at(int j, int k) const {
        return data[static_cast<std::size_t>(j) * n + k];
    }
};

// Covariance of normalised field values on a square lattice
// p_k = spacing * (k + offset), k in {0..count-1}^d.  For the planar
// analytic kernel (d = 2, closed form):
//   Sigma_jk = exp(-i (p_j ^ p_k) - |p_j - p_k|^2 / 2),  s ^ t = s1 t2 - s2 t1,
// nodes ordered row-major.  For one-dimensional stationary kernels (d = 1)
// the covariance (phi * phi)(p_j - p_k) is computed by quadrature.  Other
// kernels are rejected with std::invalid_argument.
HermitianMatrix lattice_covariance(const KernelSpec& kernel, double spacing,
                                   int count_per_axis,
                                   std::array<double, 2> offset = {0.0, 0.0});

struct NoisyCheckResult {
    double spacing = 0.0;
    double epsilon = 0.0;
    int size = 0;
    double min_eigenvalue = 0.0;  // smallest eigenvalue of (1+eps)^2 Sigma - I
    bool pass = false;            // min_eigenvalue >= -1e-10
};

// Decides whether X with covariance Sigma is, after amplification by
// (1 + epsilon), an independent-noise-plus-rest decomposition: requires
// (1+epsilon)^2 Sigma - I positive semidefinite.  Sigma must be Hermitian
// with unit diagonal (tolerance 1e-12, else std::invalid_argument).
NoisyCheckResult noisy_gaussian_check(const HermitianMatrix& sigma,
                                      double epsilon, double spacing = 0.0);

// ---------------------------------------------------------------------------
// Product inequalities by Monte Carlo

struct BoundedFactor {
    std::function<double(double)> f;  // nonnegative bounded factor
    double sup_mean = 0.0;            // sup_y int f(y + z) dgamma_R(z)
};

struct ProductInequalityResult {
    double lhs = 0.0;
    double lhs_std_error = 0.0;
    double rhs = 0.0;
    double rhs_std_error = 0.0;
    int n = 0;
    bool pass = false;  // lhs <= rhs + 3 * (lhs se + rhs se)
};

// E prod_k f_k(X_k) <= prod_k sup_y E f_k(y + Z) for X = Y + Z with Z
// i.i.d. standard normal independent of Y ~ N(0, y_covariance).  The
// covariance must be real symmetric positive semidefinite.
ProductInequalityResult noisy_product_inequality_mc(
    const HermitianMatrix& y_covariance,
    const std::vector<BoundedFactor>& factors, int n_samples, std::uint64_t seed);

// E exp sum_k |psi(X_k + S_k) - psi(X_k - S_k)| <= E exp sum_k g_bound(S_k)
// for X as above and S i.i.d. N(0, shift_scale^2) independent of X.
// psi must be a real-domain map; g_bound(s) must dominate
// log int exp|psi(x + s) - psi(x - s)| dgamma_{h,1}(x) for every shift h.
ProductInequalityResult smeared_pair_inequality_mc(
    const PsiSpec& psi, const std::function<double(double)>& g_bound,
    const HermitianMatrix& y_covariance, double shift_scale, int n_samples,
    std::uint64_t seed);

// ---------------------------------------------------------------------------
// Explicit two-function family with a large-deviation profile

// Two jointly Gaussian smooth functions X1 = xi0 f + xi1 g, X2 = xi0 f + xi2 g
// built from three independent standard complex Gaussians, with
// g(t) = exp(-t^n).  The event
//   A = { |xi0| <= eps, |xi1| <= eps, |xi2| >= 1 }
// has probability ~ e^{-1} eps^4 yet forces a large integrated log-modulus
// gap between X1 and X2 on [a, b]: the analytic lower bound below grows
// without bound as eps -> 0, while any envelope argument would cap it.
struct CounterexampleProfile {
    int exponent = 2;        // n in g(t) = exp(-t^n)
    double epsilon = 0.0;
    double a = 0.0;          // (log(1/eps) / 4)^{1/n}
    double b = 0.0;          // (3 log(1/eps) / 4)^{1/n}
    double log_gap_floor = 0.0;   // pointwise floor log(1/eps)/4 - const on [a,b]
    double floor_constant = 0.0;  // const = log(4 + 2 eps^{1/4})
    double lower_bound = 0.0;     // (b - a) * log_gap_floor
    double probability_exact = 0.0;   // (1 - e^{-eps^2})^2 e^{-1}
    double probability_mc = 0.0;      // Monte-Carlo estimate of P(A)
    double probability_std_error = 0.0;
    double scaled_probability_mc = 0.0;  // probability_mc / eps^4
    int n_samples = 0;
};

// Requires exponent >= 1 and 0 < epsilon < e^{-4/3} (so that the floor is
// positive for small eps and a < b are defined).  n_samples = 0 skips the
// Monte-Carlo part.
CounterexampleProfile counterexample_profile(int exponent, double epsilon,
                                             int n_samples = 0,
                                             std::uint64_t seed = 0);

}  // namespace fieldsim
