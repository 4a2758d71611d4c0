#pragma once

// Exponential-moment bounds for Gaussian processes with Monte Carlo
// counterparts, a shift inequality for radially decreasing profiles, and
// dyadic-shell convergence diagnostics for two-cone interaction integrals.

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fieldsim {

// --- Closed-form bounds on E exp(integral of |G|) -------------------------

// Sharp bound 2 e^{c^2/2} Phi(c) where c aggregates integral sqrt(E G_t^2);
// attained by a fully correlated process.  Equals E exp(c|Z|) for standard
// normal Z.  Requires c >= 0.
double exp_moment_bound_tight(double c);

// Simpler overestimate exp(sqrt(2/pi) c + c^2/2); dominates the tight bound
// for every c >= 0.
double exp_moment_bound_weak(double c);

// Fractional-power variant: bound on E exp(integral of |G|^delta) with
// c aggregating integral (E G_t^2)^{delta/2}.  Value is
// integral exp(c |u|^delta) dgamma(u) over the real line by quadrature;
// requires c >= 0 and delta in (0, 2).  At delta = 1 this reproduces the
// tight bound (independent quadrature route).
double exp_moment_bound_fractional(double c, double delta);

// Two-process variant: bound on E exp(integral of |xi| + |eta|) with the two
// aggregated scales added; same right-hand side as the tight bound.
double exp_moment_bound_pair(double c_xi, double c_eta);

// --- Monte Carlo comparison against the tight bound -----------------------

// A centered Gaussian field sampled on finitely many cells of equal volume;
// cov(i, j) = E G_i G_j must be symmetric positive semidefinite.  The
// aggregated scale is c = cell_volume * sum_i sqrt(cov(i, i)).
struct CorrelationModel {
    std::string name;
    std::size_t cells = 0;
    double cell_volume = 1.0;
    std::function<double(std::size_t, std::size_t)> cov;
};

// Same layout with the field scaled by factor (covariance by factor^2), so
// the aggregated scale c scales by |factor|.
CorrelationModel scale_model(const CorrelationModel& model, double factor);

struct BoundReport {
    std::string name;
    double c = 0.0;           // aggregated scale parameter
    double delta = 0.0;       // fractional exponent when applicable, else 0
    double analytic = 0.0;    // bound value at c
    double mc_estimate = std::numeric_limits<double>::quiet_NaN();
    double mc_std_error = std::numeric_limits<double>::quiet_NaN();
    long n_samples = 0;
    bool has_mc = false;
    bool heavy_tail = false;  // top 1% of samples carries > half the mean
    bool pass = false;        // mc_estimate <= analytic + 3 std errors
};

// Estimates E exp(cell_volume * sum_i |G_i|) over n_samples draws of the
// model and compares it with the tight bound at the model's aggregated
// scale.  Requires n_samples >= 100 and a valid model (throws
// std::invalid_argument otherwise).
BoundReport mc_exp_moment_vs_bound(const CorrelationModel& model,
                                   long n_samples, std::uint64_t seed);

// --- Shift inequality for decreasing profiles ------------------------------

// Controls the quadrature windows of rearrangement_check.
struct ProfileQuadrature {
    double radius = 40.0;   // outer integration window
    double epsrel = 1e-10;  // relative tolerance per 1D integral
};

struct RearrangementResult {
    double shifted = 0.0;    // integral f(|x + a e1|) g(|x|) dx
    double centered = 0.0;   // integral f(|x|) g(|x|) dx
    double shift = 0.0;
    int dim = 1;
    double tolerance = 0.0;  // slack granted to the comparison
    bool pass = false;       // shifted <= centered + tolerance
};

// For profiles f, g decreasing on (0, infinity), the shifted product integral
// never exceeds the centered one.  Both sides are evaluated by quadrature in
// dimension 1 or 2; integrable singularities at the origin (e.g. f(r) = 1/r
// in dimension 2) are supported.  Throws std::invalid_argument for other
// dimensions or a negative shift, and propagates quadrature failures.
RearrangementResult rearrangement_check(const std::function<double(double)>& f,
                                        const std::function<double(double)>& g,
                                        double shift, int dim,
                                        const ProfileQuadrature& quad = {});

// --- Two-cone interaction integrals ----------------------------------------

// Closed-form radial tail: integral_R^infinity r (1+r)^{-alpha} dr.
// Requires alpha > 2 and R >= 0.
double decay_tail_mass(double radius, double alpha);

// Mass of (1 + |u|)^{-alpha} over the quadrant {u1 >= x, u2 >= y} (x, y >= 0)
// and over the halfplane {u1 >= distance}; evaluated from the closed-form
// radial tail and a finite angular integral so the result stays accurate for
// arbitrarily large arguments.
double quadrant_tail_mass(double x, double y, double alpha);
double halfplane_tail_mass(double distance, double alpha);

// The two named cone pairs (outer region K1, inner region K2):
//   OpposingQuadrants: K1 = (-inf,0]^2, K2 = [0,inf)^2;
//   ConeVersusHalfplane: K1 = {t1 >= |t2|}, K2 = {s1 <= 0}.
enum class ConePair { OpposingQuadrants, ConeVersusHalfplane };

// Integral: outer integral over K1.  LatticeSum: outer sum over the shifted
// integer lattice points of K1 (inner mass stays a continuum integral).
enum class ConeMode { Integral, LatticeSum };

struct ShellTerm {
    int index = 0;       // shell n covers 2^n < |t| <= 2^{n+1}
    double value = 0.0;  // shell contribution c_n
    double ratio = 0.0;  // c_n / c_{n-1}; 0 for the first shell
};

struct ConeResult {
    double alpha = 0.0;
    double delta = 0.0;
    ConePair pair = ConePair::OpposingQuadrants;
    ConeMode mode = ConeMode::Integral;
    std::array<double, 2> offset{0.0, 0.0};
    double head = 0.0;  // contribution of |t| <= 1
    std::vector<ShellTerm> shells;
    double tail_estimate = 0.0;     // geometric estimate beyond the last shell
    double total = 0.0;             // head + shells + tail_estimate
    bool convergent_claim = false;  // alpha > 2 (1 + 2/delta)
    bool converged = false;         // truncation criterion was met
    double shell_ratio_limit = 0.0;  // asymptotic c_{n+1}/c_n
    double refinement_error = 0.0;   // relative change under order doubling
};

// Outer integral (or lattice sum) over K1 of
//   (mass of (1+|t-s|)^{-alpha} over K2)^{delta/2}
// accumulated over dyadic radial shells.  Shells stop once the last one
// contributes less than 1e-4 of the running total (a geometric tail estimate
// is then added), or after max_shells shells.  The asymptotic shell ratio is
// 2^{2 + delta (2 - alpha) / 2}, below 1 exactly when alpha > 2 (1 + 2/delta).
// Divergent parameter choices return per-shell diagnostics with no error.
// Throws SlowConvergenceError when an Integral-mode run with a convergent
// claim fails the truncation criterion within max_shells, and
// std::invalid_argument for alpha <= 2, delta outside (0, 2), or
// nonpositive max_shells / refinement_levels.
struct SlowConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ConeResult cone_integral(double alpha, double delta, ConePair pair,
                         ConeMode mode = ConeMode::Integral,
                         std::array<double, 2> offset = {0.0, 0.0},
                         int max_shells = 64, int refinement_levels = 2);

}  // namespace fieldsim
