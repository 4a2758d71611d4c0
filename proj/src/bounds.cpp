#include "fieldsim/bounds.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <utility>

#include "fieldsim/quadrature.hpp"
#include "fieldsim/rng.hpp"
#include "fieldsim/splits.hpp"

namespace fieldsim {

namespace {

constexpr double kPi = std::numbers::pi;

double normal_component(std::uint64_t seed, std::uint64_t stream, long j) {
    auto p = normal_pair(seed, stream, static_cast<std::uint64_t>(j) / 2);
    return (j % 2 == 0) ? p.first : p.second;
}

// Fixed Gauss-Legendre tables on [0, 1]; mapped to arbitrary intervals so the
// hot integrands never re-derive nodes.
const std::vector<std::pair<double, double>>& unit_gl_table(int order) {
    // node-based map: entries never move, so references survive nested calls
    static std::map<int, std::vector<std::pair<double, double>>> cache;
    if (order <= 0) throw std::invalid_argument("quadrature order must be positive");
    auto& slot = cache[order];
    if (slot.empty()) slot = gauss_legendre(order, 0.0, 1.0);
    return slot;
}

template <typename F>
double integrate_gl(int order, double lo, double hi, F&& f) {
    if (!(hi > lo)) return 0.0;
    const auto& table = unit_gl_table(order);
    const double span = hi - lo;
    double sum = 0.0;
    for (const auto& [x, w] : table) sum += w * f(lo + span * x);
    return span * sum;
}

double quadrant_tail_mass_impl(double x, double y, double alpha, int order) {
    if (x == 0.0 && y == 0.0) return kPi / 2 * decay_tail_mass(0.0, alpha);
    const double split = std::atan2(y, x);
    double sum = 0.0;
    if (split > 0.0)
        sum += integrate_gl(order, 0.0, split, [&](double t) {
            return decay_tail_mass(y / std::sin(t), alpha);
        });
    if (split < kPi / 2)
        sum += integrate_gl(order, split, kPi / 2, [&](double t) {
            return decay_tail_mass(x / std::cos(t), alpha);
        });
    return sum;
}

double halfplane_tail_mass_impl(double distance, double alpha, int order) {
    return 2.0 * integrate_gl(order, 0.0, kPi / 2, [&](double t) {
        return decay_tail_mass(distance / std::cos(t), alpha);
    });
}

// Outer integrand of the cone integral at a point t of the outer region
// (already reduced to nonnegative coordinates), raised to the delta/2 power.
double cone_point_value(ConePair pair, double t1, double t2, double alpha,
                        double delta, int inner_order) {
    double mass = (pair == ConePair::OpposingQuadrants)
                      ? quadrant_tail_mass_impl(t1, t2, alpha, inner_order)
                      : halfplane_tail_mass_impl(t1, alpha, inner_order);
    return std::pow(mass, delta / 2);
}

// Integral over the outer region restricted to lo < |t| <= hi (lo = 0 for the
// head region), in polar coordinates with fixed-order panels.
double cone_band_integral(ConePair pair, double lo, double hi, double alpha,
                          double delta, int angular_order, int radial_order,
                          int inner_order) {
    if (pair == ConePair::OpposingQuadrants) {
        // outer region reflected to the first quadrant; angle spans [0, pi/2]
        return integrate_gl(angular_order, 0.0, kPi / 2, [&](double phi) {
            const double c = std::cos(phi), s = std::sin(phi);
            return integrate_gl(radial_order, lo, hi, [&](double rho) {
                return rho * cone_point_value(pair, rho * c, rho * s, alpha,
                                              delta, inner_order);
            });
        });
    }
    // 45-degree cone {t1 >= |t2|}: symmetric about the t1 axis
    return 2.0 * integrate_gl(angular_order, 0.0, kPi / 4, [&](double phi) {
        const double c = std::cos(phi);
        return integrate_gl(radial_order, lo, hi, [&](double rho) {
            return rho * cone_point_value(pair, rho * c, 0.0, alpha, delta,
                                          inner_order);
        });
    });
}

// Sum over points of the shifted integer lattice falling in the outer region
// with lo < |t| <= hi.
double cone_band_lattice_sum(ConePair pair, double lo, double hi, double alpha,
                             double delta, std::array<double, 2> offset,
                             int inner_order) {
    const long reach = static_cast<long>(std::ceil(hi)) + 2;
    double sum = 0.0;
    for (long k1 = -reach; k1 <= reach; ++k1) {
        const double t1 = static_cast<double>(k1) + offset[0];
        for (long k2 = -reach; k2 <= reach; ++k2) {
            const double t2 = static_cast<double>(k2) + offset[1];
            const double norm = std::hypot(t1, t2);
            if (norm <= lo || norm > hi) continue;
            if (pair == ConePair::OpposingQuadrants) {
                if (t1 > 0.0 || t2 > 0.0) continue;
                sum += cone_point_value(pair, -t1, -t2, alpha, delta,
                                        inner_order);
            } else {
                if (t1 < std::abs(t2)) continue;
                sum += cone_point_value(pair, t1, 0.0, alpha, delta,
                                        inner_order);
            }
        }
    }
    return sum;
}

struct ConePass {
    double head = 0.0;
    std::vector<ShellTerm> shells;
    double tail_estimate = 0.0;
    double total = 0.0;
    bool converged = false;
};

ConePass cone_pass(double alpha, double delta, ConePair pair, ConeMode mode,
                   std::array<double, 2> offset, int max_shells, int level,
                   bool convergent_claim) {
    const int inner_order = 32 << level;
    const int angular_order = 24 << level;
    const int radial_order = 16 << level;
    auto band = [&](double lo, double hi) {
        return mode == ConeMode::Integral
                   ? cone_band_integral(pair, lo, hi, alpha, delta,
                                        angular_order, radial_order,
                                        inner_order)
                   : cone_band_lattice_sum(pair, lo, hi, alpha, delta, offset,
                                           inner_order);
    };
    ConePass pass;
    pass.head = band(0.0, 1.0);
    double running = pass.head;
    for (int n = 0; n < max_shells; ++n) {
        const double lo = std::ldexp(1.0, n);
        ShellTerm term;
        term.index = n;
        term.value = band(lo, 2 * lo);
        term.ratio = pass.shells.empty()
                         ? 0.0
                         : term.value / pass.shells.back().value;
        pass.shells.push_back(term);
        running += term.value;
        if (convergent_claim && n >= 1 && term.value < 1e-4 * running) {
            pass.converged = true;
            break;
        }
    }
    pass.total = running;
    if (pass.converged) {
        const double r = pass.shells.back().ratio;
        if (r > 0.0 && r < 1.0)
            pass.tail_estimate = pass.shells.back().value * r / (1.0 - r);
        pass.total += pass.tail_estimate;
    }
    return pass;
}

// Symmetric PSD square root factor of a correlation model's covariance.
Eigen::MatrixXd model_factor(const CorrelationModel& model) {
    const auto m = static_cast<Eigen::Index>(model.cells);
    Eigen::MatrixXd c(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            c(i, j) = model.cov(static_cast<std::size_t>(i),
                                static_cast<std::size_t>(j));
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw std::invalid_argument("covariance must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    if (es.eigenvalues().minCoeff() < -1e-9 * scale)
        throw std::invalid_argument("covariance must be positive semidefinite");
    Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * roots.asDiagonal();
}

}  // namespace

double exp_moment_bound_tight(double c) {
    if (c < 0.0) throw std::invalid_argument("scale must be nonnegative");
    return std::exp(c * c / 2) * std::erfc(-c / std::numbers::sqrt2);
}

double exp_moment_bound_weak(double c) {
    if (c < 0.0) throw std::invalid_argument("scale must be nonnegative");
    return std::exp(std::sqrt(2.0 / kPi) * c + c * c / 2);
}

double exp_moment_bound_fractional(double c, double delta) {
    if (c < 0.0) throw std::invalid_argument("scale must be nonnegative");
    if (!(delta > 0.0 && delta < 2.0))
        throw std::invalid_argument("fractional exponent must lie in (0, 2)");
    // 2 / sqrt(2 pi) * int_0^inf exp(c u^delta - u^2/2) du; the exponent peaks
    // at u* = (c delta)^{1/(2-delta)} and decays Gaussianly beyond it.
    const double peak =
        c > 0.0 ? std::pow(c * delta, 1.0 / (2.0 - delta)) : 0.0;
    const double radius = std::max(40.0, 10.0 * peak + 20.0);
    std::vector<double> breaks{0.0, 1.0, peak, radius};
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const double integral = integrate_with_breaks(
        [&](double u) {
            return std::exp(c * std::pow(u, delta) - u * u / 2);
        },
        breaks, 0.0, 1e-12);
    return std::sqrt(2.0 / kPi) * integral;
}

double exp_moment_bound_pair(double c_xi, double c_eta) {
    if (c_xi < 0.0 || c_eta < 0.0)
        throw std::invalid_argument("scales must be nonnegative");
    return exp_moment_bound_tight(c_xi + c_eta);
}

CorrelationModel scale_model(const CorrelationModel& model, double factor) {
    CorrelationModel scaled = model;
    auto base = model.cov;
    const double f2 = factor * factor;
    scaled.cov = [base = std::move(base), f2](std::size_t i, std::size_t j) {
        return f2 * base(i, j);
    };
    return scaled;
}

BoundReport mc_exp_moment_vs_bound(const CorrelationModel& model,
                                   long n_samples, std::uint64_t seed) {
    if (model.cells == 0 || !model.cov)
        throw std::invalid_argument("model needs cells and a covariance");
    if (!(model.cell_volume > 0.0))
        throw std::invalid_argument("cell volume must be positive");
    if (n_samples < 100)
        throw std::invalid_argument("need at least 100 samples");
    const Eigen::MatrixXd factor = model_factor(model);
    const auto m = static_cast<Eigen::Index>(model.cells);

    double c = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
        c += model.cell_volume * std::sqrt(model.cov(
                 static_cast<std::size_t>(i), static_cast<std::size_t>(i)));

    std::vector<double> integrals(static_cast<std::size_t>(n_samples));
    Eigen::VectorXd z(m);
    for (long s = 0; s < n_samples; ++s) {
        for (Eigen::Index i = 0; i < m; ++i)
            z(i) = normal_component(seed, 0, s * m + i);
        integrals[static_cast<std::size_t>(s)] =
            model.cell_volume * (factor * z).cwiseAbs().sum();
    }
    const ExpMomentResult em = exp_moment(integrals, 1.0);

    BoundReport report;
    report.name = model.name;
    report.c = c;
    report.analytic = exp_moment_bound_tight(c);
    report.mc_estimate = em.estimate;
    report.mc_std_error = em.std_error;
    report.n_samples = n_samples;
    report.has_mc = true;
    report.heavy_tail = em.heavy_tail;
    report.pass = em.estimate <= report.analytic + 3 * em.std_error;
    return report;
}

RearrangementResult rearrangement_check(const std::function<double(double)>& f,
                                        const std::function<double(double)>& g,
                                        double shift, int dim,
                                        const ProfileQuadrature& quad) {
    if (!f || !g) throw std::invalid_argument("profiles must be callable");
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("dimension must be 1 or 2");
    if (shift < 0.0) throw std::invalid_argument("shift must be nonnegative");
    const double radius = quad.radius;
    if (!(radius > shift))
        throw std::invalid_argument("window must exceed the shift");

    RearrangementResult result;
    result.shift = shift;
    result.dim = dim;

    auto centered_breaks = [&](std::vector<double> pts) {
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        return pts;
    };

    if (dim == 1) {
        result.centered = integrate_with_breaks(
            [&](double x) { return f(std::abs(x)) * g(std::abs(x)); },
            centered_breaks({-radius, 0.0, radius}), 0.0, quad.epsrel);
        result.shifted = integrate_with_breaks(
            [&](double x) { return f(std::abs(x + shift)) * g(std::abs(x)); },
            centered_breaks({-radius, -shift, 0.0, radius}), 0.0, quad.epsrel);
    } else {
        result.centered =
            2 * kPi *
            integrate_with_breaks(
                [&](double r) { return r * f(r) * g(r); },
                centered_breaks({0.0, std::min(1.0, radius / 2), radius}), 0.0,
                quad.epsrel);
        if (shift == 0.0) {
            result.shifted = result.centered;  // identical integrals
        } else {
            // shifted integral in polar coordinates about the center of g;
            // the angular integral sees |x + a e1| = sqrt(r^2+a^2+2ar cos t).
            // The distance is floored at a negligible scale so profiles with
            // an integrable origin singularity stay finite pointwise.
            auto angular = [&](double r) {
                const double floor = 1e-9 * (1.0 + shift + r);
                return 2.0 *
                       integrate_with_breaks(
                           [&](double t) {
                               double d2 = r * r + shift * shift +
                                           2 * r * shift * std::cos(t);
                               return f(std::sqrt(
                                   std::max(d2, floor * floor)));
                           },
                           {0.0, kPi / 2, kPi * 15 / 16, kPi}, 0.0,
                           quad.epsrel);
            };
            result.shifted = integrate_with_breaks(
                [&](double r) { return r * g(r) * angular(r); },
                centered_breaks(
                    {0.0, shift / 2, shift, 2 * shift, radius}),
                0.0, quad.epsrel);
        }
    }
    result.tolerance = 1e-7 * (1.0 + std::abs(result.centered));
    result.pass = result.shifted <= result.centered + result.tolerance;
    return result;
}

double decay_tail_mass(double radius, double alpha) {
    if (!(alpha > 2.0))
        throw std::invalid_argument("decay exponent must exceed 2");
    if (radius < 0.0) throw std::invalid_argument("radius must be nonnegative");
    const double base = 1.0 + radius;
    return std::pow(base, 2.0 - alpha) / (alpha - 2.0) -
           std::pow(base, 1.0 - alpha) / (alpha - 1.0);
}

double quadrant_tail_mass(double x, double y, double alpha) {
    if (x < 0.0 || y < 0.0)
        throw std::invalid_argument("corner coordinates must be nonnegative");
    (void)decay_tail_mass(0.0, alpha);  // validates alpha
    return quadrant_tail_mass_impl(x, y, alpha, 48);
}

double halfplane_tail_mass(double distance, double alpha) {
    if (distance < 0.0)
        throw std::invalid_argument("distance must be nonnegative");
    (void)decay_tail_mass(0.0, alpha);  // validates alpha
    return halfplane_tail_mass_impl(distance, alpha, 48);
}

ConeResult cone_integral(double alpha, double delta, ConePair pair,
                         ConeMode mode, std::array<double, 2> offset,
                         int max_shells, int refinement_levels) {
    if (!(alpha > 2.0))
        throw std::invalid_argument("decay exponent must exceed 2");
    if (!(delta > 0.0 && delta < 2.0))
        throw std::invalid_argument("power must lie in (0, 2)");
    if (max_shells < 1) throw std::invalid_argument("need at least one shell");
    if (refinement_levels < 1)
        throw std::invalid_argument("need at least one refinement level");

    ConeResult result;
    result.alpha = alpha;
    result.delta = delta;
    result.pair = pair;
    result.mode = mode;
    result.offset = offset;
    result.convergent_claim = alpha > 2.0 * (1.0 + 2.0 / delta);
    result.shell_ratio_limit =
        std::exp2(2.0 + delta * (2.0 - alpha) / 2.0);

    double previous_total = 0.0;
    for (int level = 0; level < refinement_levels; ++level) {
        ConePass pass = cone_pass(alpha, delta, pair, mode, offset, max_shells,
                                  level, result.convergent_claim);
        if (result.convergent_claim && !pass.converged &&
            mode == ConeMode::Integral)
            throw SlowConvergenceError(
                "cone integral shells failed to decay within the shell budget");
        result.head = pass.head;
        result.shells = std::move(pass.shells);
        result.tail_estimate = pass.tail_estimate;
        result.converged = pass.converged;
        result.refinement_error =
            level == 0 ? 0.0
                       : std::abs(pass.total - previous_total) /
                             std::max(std::abs(pass.total), 1e-300);
        previous_total = pass.total;
        result.total = pass.total;
    }
    return result;
}

}  // namespace fieldsim
