#include "fieldsim/gef.hpp"

#include <gsl/gsl_sf_gamma.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fieldsim/constants.hpp"
#include "fieldsim/quadrature.hpp"
#include "fieldsim/rng.hpp"

namespace fieldsim {

namespace {

constexpr double kStableRadius = 36.0;   // e^{-|z|^2/2} stays a normal double
constexpr double kSingularFloor = 1e-300;
constexpr double kRootResidualTol = 1e-10;
constexpr double kZeroMargin = 2.0;      // extra radius covered when rooting
constexpr double kTruncTol = 1e-12;

// Shared damped-series evaluator: F*(z) = sum zeta_k u_k(z) with
// u_0 = e^{-|z|^2/2}, u_{k+1} = u_k z / sqrt(k+1).  Every u_k is bounded by 1
// in modulus, so the recurrence neither overflows nor loses leading digits.
class FstarEvaluator {
  public:
    explicit FstarEvaluator(const GefCoefficients& coeffs) : coeffs_(coeffs) {
        inv_sqrt_.resize(coeffs.zeta.size());
        for (std::size_t k = 1; k < inv_sqrt_.size(); ++k) {
            inv_sqrt_[k] = 1.0 / std::sqrt(static_cast<double>(k));
        }
    }

    std::complex<double> operator()(std::complex<double> z) const {
        const double rho_sq = std::norm(z);
        if (rho_sq > kStableRadius * kStableRadius) {
            throw std::domain_error(
                "eval_fstar: |z| exceeds the stable evaluation radius 36");
        }
        std::complex<double> term = std::exp(-0.5 * rho_sq);
        std::complex<double> acc = coeffs_.zeta[0] * term;
        const std::size_t n = coeffs_.zeta.size();
        for (std::size_t k = 1; k < n; ++k) {
            term *= z * inv_sqrt_[k];
            acc += coeffs_.zeta[k] * term;
            // Past the modal index the terms decay super-geometrically.
            if (static_cast<double>(k) > rho_sq && std::norm(term) < 1e-44) {
                break;
            }
        }
        return acc;
    }

  private:
    const GefCoefficients& coeffs_;
    std::vector<double> inv_sqrt_;
};

double poisson_upper_tail(int n, double lambda) {
    // P(Poisson(lambda) > n) as a regularised lower incomplete gamma.
    return gsl_sf_gamma_inc_P(static_cast<double>(n) + 1.0, lambda);
}

}  // namespace

GefCoefficients sample_gef(int order, std::uint64_t seed,
                           std::uint64_t stream) {
    if (order < 0) {
        throw std::invalid_argument("sample_gef: order must be >= 0");
    }
    GefCoefficients coeffs;
    coeffs.seed = seed;
    coeffs.zeta.resize(static_cast<std::size_t>(order) + 1);
    for (std::size_t k = 0; k < coeffs.zeta.size(); ++k) {
        coeffs.zeta[k] = complex_normal(seed, stream, k);
    }
    return coeffs;
}

int truncation_order(double radius, double tol) {
    if (!(radius > 0.0) || !(tol > 0.0) || !(tol < 1.0)) {
        throw std::invalid_argument(
            "truncation_order: need radius > 0 and tol in (0, 1)");
    }
    const double lambda = radius * radius;
    int lo = 0;
    int hi = static_cast<int>(std::ceil(lambda)) + 8;
    while (poisson_upper_tail(hi, lambda) > tol) {
        hi *= 2;
        if (hi > (1 << 26)) {
            throw std::runtime_error("truncation_order: tail search overflow");
        }
    }
    while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (poisson_upper_tail(mid, lambda) <= tol) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

std::complex<double> eval_fstar(const GefCoefficients& coeffs,
                                std::complex<double> z) {
    if (coeffs.zeta.empty()) {
        throw std::invalid_argument("eval_fstar: empty coefficient vector");
    }
    return FstarEvaluator(coeffs)(z);
}

XValue log_field_value(const GefCoefficients& coeffs, std::complex<double> z) {
    const std::complex<double> f = eval_fstar(coeffs, z);
    const double modulus = std::abs(f);
    XValue out;
    if (modulus < kSingularFloor) {
        out.singular = true;
        out.value = 0.0;
        return out;
    }
    out.value = std::log(modulus) + 0.5 * euler_gamma();
    return out;
}

XField field_X(const GefCoefficients& coeffs, const Lattice& lattice) {
    if (lattice.dim != 2) {
        throw std::invalid_argument("field_X: lattice must be planar");
    }
    const FstarEvaluator fs(coeffs);
    const double half_gamma = 0.5 * euler_gamma();

    XField out;
    out.grid.on_lattice = true;
    out.grid.lattice = lattice;
    out.grid.complex_field = false;
    out.grid.provenance = "gef-log-modulus";
    const long n = lattice.half_count();
    out.grid.points.reserve(lattice.size());
    out.grid.re.resize(lattice.size(), 0.0);
    out.singular.assign(lattice.size(), 0);
    for (long i = -n; i <= n; ++i) {
        for (long j = -n; j <= n; ++j) {
            const auto node = lattice.node(i, j);
            const std::complex<double> z(node[0], node[1]);
            out.grid.points.push_back({node[0], node[1]});
            const std::size_t idx = lattice.index(i, j);
            const double modulus = std::abs(fs(z));
            if (modulus < kSingularFloor) {
                out.singular[idx] = 1;
                ++out.singular_count;
            } else {
                out.grid.re[idx] = std::log(modulus) + half_gamma;
            }
        }
    }
    return out;
}

namespace {

// Horner evaluation of p and p' for the rescaled polynomial.
void horner(const std::vector<std::complex<double>>& c, std::complex<double> w,
            std::complex<double>& p, std::complex<double>& dp) {
    const std::size_t n = c.size();
    std::complex<double> b = c[n - 1];
    std::complex<double> d = 0.0;
    for (std::size_t k = n - 1; k-- > 0;) {
        d = d * w + b;
        b = b * w + c[k];
    }
    p = b;
    dp = d;
}

// Simultaneous root refinement (Ehrlich/Aberth) with per-root locking.
// Returns false if convergence stalls.
//
// An iterate ejected far out (a repulsion blow-up near a colliding pair)
// returns in a handful of steps: with the other iterates converged, the
// Aberth denominator turns the Newton step into a near-full-distance jump.
// Ejections past the Horner overflow range would go non-finite and poison
// the sweep permanently, so the magnitude is clamped to the largest safely
// evaluable radius (direction kept) and true NaNs are re-seeded inside.
bool aberth_solve(const std::vector<std::complex<double>>& c,
                  std::vector<std::complex<double>>& w) {
    const std::size_t m = w.size();
    std::vector<std::uint8_t> locked(m, 0);
    constexpr int kMaxIter = 600;
    const double eval_radius =
        std::min(1e6, std::pow(10.0, 296.0 / (static_cast<double>(m) + 2.0)));
    for (int iter = 0; iter < kMaxIter; ++iter) {
        std::size_t done = 0;
        for (std::size_t j = 0; j < m; ++j) {
            if (locked[j]) {
                ++done;
                continue;
            }
            const double mag = std::abs(w[j]);
            if (!std::isfinite(mag)) {
                const double angle =
                    2.4 * static_cast<double>(j + 1) +
                    0.7 * static_cast<double>(iter + 1);
                w[j] = std::polar(0.5, angle);
                continue;
            }
            if (mag > eval_radius) {
                w[j] *= eval_radius / mag;
            }
            std::complex<double> p, dp;
            horner(c, w[j], p, dp);
            if (!std::isfinite(std::abs(p)) || !std::isfinite(std::abs(dp))) {
                const double angle =
                    2.4 * static_cast<double>(j + 1) +
                    0.7 * static_cast<double>(iter + 1);
                w[j] = std::polar(0.5, angle);
                continue;
            }
            if (std::abs(p) == 0.0) {
                locked[j] = 1;
                ++done;
                continue;
            }
            std::complex<double> newton;
            if (std::abs(dp) > 0.0) {
                newton = p / dp;
            } else {
                // Derivative vanished at the iterate: nudge off the spot.
                w[j] += std::complex<double>(1e-6, 1e-6);
                continue;
            }
            std::complex<double> repulsion = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                if (k == j) continue;
                const std::complex<double> diff = w[j] - w[k];
                if (std::norm(diff) < 1e-60) {
                    continue;  // colliding pair handled by the nudge below
                }
                repulsion += 1.0 / diff;
            }
            const std::complex<double> denom = 1.0 - newton * repulsion;
            std::complex<double> step;
            if (std::abs(denom) > 1e-12) {
                step = newton / denom;
            } else {
                step = newton;
            }
            w[j] -= step;
            if (std::abs(step) < 5e-15 * (1.0 + std::abs(w[j]))) {
                locked[j] = 1;
                ++done;
            }
        }
        if (done == m) {
            return true;
        }
    }
    return false;
}

// Companion-matrix eigenvalues: robust but O(m^3) fallback for modest degree.
std::vector<std::complex<double>> companion_roots(
    const std::vector<std::complex<double>>& c) {
    const std::size_t m = c.size() - 1;
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k + 1 < m; ++k) {
        companion(static_cast<Eigen::Index>(k + 1),
                  static_cast<Eigen::Index>(k)) = 1.0;
    }
    for (std::size_t k = 0; k < m; ++k) {
        companion(static_cast<Eigen::Index>(k),
                  static_cast<Eigen::Index>(m - 1)) = -c[k] / c[m];
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success) {
        throw ZeroFindingError(
            "find_zeros: companion eigenvalue fallback failed");
    }
    std::vector<std::complex<double>> roots(m);
    for (std::size_t k = 0; k < m; ++k) {
        roots[k] = solver.eigenvalues()(static_cast<Eigen::Index>(k));
    }
    return roots;
}

constexpr std::size_t kCompanionMaxDegree = 60;

// Winding number of F* around the circle |z| = radius by adaptive phase
// accumulation: halve any arc whose phase increment is ambiguous.  The
// caller picks initial_segments so that every arc is shorter than the
// distance from the circle to the nearest root; otherwise a pair of roots
// hugging the contour can hide a full 2*pi swing inside one arc while the
// endpoint phases nearly agree, and the subdivision test never fires.
long winding_on_circle(const FstarEvaluator& fs, double radius,
                       int initial_segments) {
    constexpr int kMaxDepth = 28;
    struct ArcTotal {
        double total = 0.0;
    };
    std::function<void(double, std::complex<double>, double,
                       std::complex<double>, int, ArcTotal&)>
        accumulate = [&](double t0, std::complex<double> f0, double t1,
                         std::complex<double> f1, int depth, ArcTotal& acc) {
            const double dphase = std::arg(f1 / f0);
            if (std::abs(dphase) <= std::numbers::pi / 2 || depth >= kMaxDepth) {
                acc.total += dphase;
                return;
            }
            const double tm = 0.5 * (t0 + t1);
            const std::complex<double> fm = fs(std::polar(radius, tm));
            accumulate(t0, f0, tm, fm, depth + 1, acc);
            accumulate(tm, fm, t1, f1, depth + 1, acc);
        };

    std::vector<std::complex<double>> boundary(initial_segments + 1);
    for (int i = 0; i <= initial_segments; ++i) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) /
                             initial_segments;
        boundary[i] = fs(std::polar(radius, theta));
    }
    boundary.back() = boundary.front();
    ArcTotal acc;
    for (int i = 0; i < initial_segments; ++i) {
        const double t0 = 2.0 * std::numbers::pi * static_cast<double>(i) /
                          initial_segments;
        const double t1 = 2.0 * std::numbers::pi *
                          static_cast<double>(i + 1) / initial_segments;
        accumulate(t0, boundary[i], t1, boundary[i + 1], 0, acc);
    }
    const double turns = acc.total / (2.0 * std::numbers::pi);
    const long rounded = std::lround(turns);
    if (std::abs(turns - static_cast<double>(rounded)) > 0.01) {
        throw WindingMismatchError(
            "find_zeros: boundary phase accumulation did not close up");
    }
    return rounded;
}

}  // namespace

ZeroSet find_zeros(const GefCoefficients& coeffs, double radius) {
    if (!(radius > 0.0)) {
        throw std::invalid_argument("find_zeros: radius must be positive");
    }
    const int required = truncation_order(radius + kZeroMargin, kTruncTol);
    if (coeffs.order() < required) {
        throw std::invalid_argument(
            "find_zeros: coefficient order too small for the requested "
            "radius; need at least order " +
            std::to_string(required));
    }

    // Degree reduction: drop vanishing top coefficients, factor out origin
    // roots carried by vanishing low coefficients.
    std::size_t top = coeffs.zeta.size();
    while (top > 0 && std::abs(coeffs.zeta[top - 1]) == 0.0) {
        --top;
    }
    ZeroSet out;
    out.reliable_radius = radius;
    const FstarEvaluator fs(coeffs);
    if (top == 0) {
        throw ZeroFindingError("find_zeros: identically zero function");
    }
    std::size_t low = 0;
    while (low < top && std::abs(coeffs.zeta[low]) == 0.0) {
        ++low;
    }
    const std::size_t degree = top - 1 - low;
    // Rescale by s = sqrt(degree): the roots of the rescaled polynomial
    // concentrate near the unit disk, which keeps Horner well ranged.
    const double s = degree > 0 ? std::sqrt(static_cast<double>(degree)) : 1.0;
    std::vector<std::complex<double>> c;
    if (degree > 0) {
        const double log_s = std::log(s);
        std::vector<double> log_mag(degree + 1);
        double max_log = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k <= degree; ++k) {
            const std::complex<double> zk = coeffs.zeta[low + k];
            const double lm =
                std::log(std::abs(zk)) + static_cast<double>(k) * log_s -
                0.5 * std::lgamma(static_cast<double>(low + k) + 1.0) +
                0.5 * std::lgamma(static_cast<double>(low) + 1.0);
            log_mag[k] = lm;
            max_log = std::max(max_log, lm);
        }
        c.resize(degree + 1);
        for (std::size_t k = 0; k <= degree; ++k) {
            const std::complex<double> zk = coeffs.zeta[low + k];
            if (std::abs(zk) == 0.0) {
                c[k] = 0.0;
            } else {
                c[k] = (zk / std::abs(zk)) * std::exp(log_mag[k] - max_log);
            }
        }
    }

    // Up to three deterministic attempts, each with a fresh golden-angle
    // start sweep, so one stalled configuration does not abort the sample.
    constexpr int kAttempts = 3;
    constexpr double kShellFactor[kAttempts] = {1.05, 0.93, 1.17};
    constexpr double kPhaseOffset[kAttempts] = {0.4, 2.5, 4.6};
    std::string last_message;
    bool last_was_winding = false;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        std::vector<std::complex<double>> located(low, {0.0, 0.0});
        std::vector<std::complex<double>> nearby;
        if (degree > 0) {
            // Initial guesses spread over shells matching the near-uniform
            // root profile of the rescaled polynomial.
            std::vector<std::complex<double>> w(degree);
            const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
            for (std::size_t j = 0; j < degree; ++j) {
                const double rho = std::sqrt((static_cast<double>(j) + 0.5) /
                                             static_cast<double>(degree));
                const double theta =
                    golden * static_cast<double>(j) + kPhaseOffset[attempt];
                w[j] = std::polar(kShellFactor[attempt] * rho + 0.02, theta);
            }
            bool solved = aberth_solve(c, w);
            if (!solved && degree <= kCompanionMaxDegree) {
                w = companion_roots(c);
                solved = true;
            }
            if (!solved) {
                last_message =
                    "find_zeros: simultaneous iteration failed to converge";
                last_was_winding = false;
                continue;
            }
            for (const auto& root : w) {
                const std::complex<double> z = root * s;
                if (std::abs(z) <= radius) {
                    located.push_back(z);
                } else if (std::abs(z) <= radius + 1.0) {
                    nearby.push_back(z);
                }
            }
        }

        // Verification contour: slide the circle within a thin outward window
        // to maximise its clearance from every root modulus.  A root hugging
        // the contour can fold a full phase turn into one arc with nearly
        // agreeing endpoints, so the circle is placed in the widest root-free
        // gap and the arc length is tied to that clearance below.
        constexpr double kContourWindow = 0.25;
        double best_rho = radius;
        double best_clear = -1.0;
        for (int k = 0; k <= 100; ++k) {
            const double rho = radius + kContourWindow * k / 100.0;
            double clearance = kContourWindow + 0.35;
            for (const auto& z : located) {
                clearance = std::min(clearance, rho - std::abs(z));
            }
            for (const auto& z : nearby) {
                clearance = std::min(clearance, std::abs(std::abs(z) - rho));
            }
            if (clearance > best_clear) {
                best_clear = clearance;
                best_rho = rho;
            }
        }

        // Residual validation in the damped scale for every root the contour
        // count will see, including those between the reliable radius and the
        // verification circle.
        bool residual_ok = true;
        for (const auto& z : located) {
            if (std::abs(fs(z)) >= kRootResidualTol) {
                residual_ok = false;
                break;
            }
        }
        long inside = static_cast<long>(located.size());
        for (const auto& z : nearby) {
            if (std::abs(z) < best_rho) {
                ++inside;
                if (residual_ok && std::abs(fs(z)) >= kRootResidualTol) {
                    residual_ok = false;
                }
            }
        }
        if (!residual_ok) {
            last_message =
                "find_zeros: refined root fails the damped residual bound";
            last_was_winding = false;
            continue;
        }

        const int segments = std::clamp(
            static_cast<int>(std::ceil(std::numbers::pi * best_rho /
                                       std::max(best_clear, 1e-3))),
            256, 4096);
        const long winding = winding_on_circle(fs, best_rho, segments);
        if (winding != inside) {
            last_message = "find_zeros: contour count " +
                           std::to_string(winding) +
                           " disagrees with located roots " +
                           std::to_string(inside);
            last_was_winding = true;
            continue;
        }
        const long kept = static_cast<long>(located.size());
        out.zeros = std::move(located);
        // Report the count at the reliable radius itself: roots sitting
        // between it and the verification circle are subtracted back out.
        out.winding = winding - (inside - kept);
        return out;
    }
    if (last_was_winding) {
        throw WindingMismatchError(last_message);
    }
    throw ZeroFindingError(last_message);
}

TestFunction bump_test_function(const std::string& kind) {
    if (kind != "cubic") {
        throw std::invalid_argument("bump_test_function: unknown kind " + kind);
    }
    TestFunction h;
    h.kind = kind;
    h.support_radius = 1.0;
    h.profile = [](double rho) {
        if (rho >= 1.0) return 0.0;
        const double t = 1.0 - rho * rho;
        return t * t * t;
    };
    h.laplacian_profile = [](double rho) {
        if (rho >= 1.0) return 0.0;
        const double t = 1.0 - rho * rho;
        return 12.0 * t * (3.0 * rho * rho - 1.0);
    };
    h.integral = std::numbers::pi / 4.0;
    h.norm_sq = std::numbers::pi / 7.0;
    h.laplacian_norm_sq = 96.0 * std::numbers::pi / 5.0;

    // Cross-check the stored norms and the zero-mean Laplacian by quadrature.
    const double two_pi = 2.0 * std::numbers::pi;
    const double q_int = integrate_finite(
        [&](double r) { return two_pi * r * h.profile(r); }, 0.0, 1.0, 1e-12,
        1e-12);
    const double q_norm = integrate_finite(
        [&](double r) {
            const double v = h.profile(r);
            return two_pi * r * v * v;
        },
        0.0, 1.0, 1e-12, 1e-12);
    const double q_lap_norm = integrate_finite(
        [&](double r) {
            const double v = h.laplacian_profile(r);
            return two_pi * r * v * v;
        },
        0.0, 1.0, 1e-12, 1e-12);
    const double q_lap_mean = integrate_finite(
        [&](double r) { return two_pi * r * h.laplacian_profile(r); }, 0.0,
        1.0, 1e-12, 1e-12);
    if (std::abs(q_int - h.integral) > 1e-8 ||
        std::abs(q_norm - h.norm_sq) > 1e-8 ||
        std::abs(q_lap_norm - h.laplacian_norm_sq) > 1e-6 ||
        std::abs(q_lap_mean) > 1e-8) {
        throw std::logic_error(
            "bump_test_function: stored norms disagree with quadrature");
    }
    return h;
}

TestFunction scale_test_function(const TestFunction& h, double factor) {
    TestFunction out = h;
    out.kind = h.kind + "-scaled";
    const auto base_profile = h.profile;
    const auto base_laplacian = h.laplacian_profile;
    out.profile = [base_profile, factor](double rho) {
        return factor * base_profile(rho);
    };
    out.laplacian_profile = [base_laplacian, factor](double rho) {
        return factor * base_laplacian(rho);
    };
    out.integral = factor * h.integral;
    out.norm_sq = factor * factor * h.norm_sq;
    out.laplacian_norm_sq = factor * factor * h.laplacian_norm_sq;
    return out;
}

LinearStatisticResult linear_statistic(const ZeroSet& zeros,
                                       const TestFunction& h, double r) {
    if (!(r > 0.0)) {
        throw std::invalid_argument("linear_statistic: r must be positive");
    }
    if (r * h.support_radius > zeros.reliable_radius * (1.0 + 1e-12)) {
        throw CoverageError(
            "linear_statistic: scaled support exceeds the reliable radius");
    }
    LinearStatisticResult out;
    out.r = r;
    double acc = 0.0;
    for (const auto& z : zeros.zeros) {
        acc += h.profile(std::abs(z) / r);
    }
    out.value = acc;
    out.mean_term = (r * r / std::numbers::pi) * h.integral;
    out.deviation = out.value - out.mean_term;
    return out;
}

FieldStatisticResult field_statistic(const GefCoefficients& coeffs,
                                     const TestFunction& h, double r,
                                     const Lattice& lattice) {
    if (!(r > 0.0)) {
        throw std::invalid_argument("field_statistic: r must be positive");
    }
    if (lattice.dim != 2) {
        throw std::invalid_argument("field_statistic: lattice must be planar");
    }
    const double support = r * h.support_radius;
    if (lattice.half_extent < support - 1e-12) {
        throw CoverageError(
            "field_statistic: lattice does not cover the scaled support");
    }
    if (lattice.spacing > support / 50.0 + 1e-12) {
        throw CoverageError(
            "field_statistic: lattice spacing too coarse for the support");
    }

    const FstarEvaluator fs(coeffs);
    const double half_gamma = 0.5 * euler_gamma();
    const long n = lattice.half_count();
    const double cell = lattice.cell_volume();
    FieldStatisticResult out;
    double acc = 0.0;
    for (long i = -n; i <= n; ++i) {
        for (long j = -n; j <= n; ++j) {
            const auto node = lattice.node(i, j);
            const double rho = std::hypot(node[0], node[1]) / r;
            if (rho >= h.support_radius) {
                continue;
            }
            const double weight = h.laplacian_profile(rho);
            if (weight == 0.0) {
                continue;
            }
            const std::complex<double> z(node[0], node[1]);
            const double modulus = std::abs(fs(z));
            if (modulus < kSingularFloor) {
                ++out.singular_excluded;
                continue;
            }
            acc += weight * (std::log(modulus) + half_gamma);
        }
    }
    out.value = acc * cell / (2.0 * std::numbers::pi * r * r);
    return out;
}

}  // namespace fieldsim
