#include "fieldsim/smeared.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "fieldsim/constants.hpp"
#include "fieldsim/quadrature.hpp"
#include "fieldsim/rng.hpp"

namespace fieldsim {

namespace {

constexpr double kPi = std::numbers::pi;

double normal_component(std::uint64_t seed, std::uint64_t stream, int j) {
    auto p = normal_pair(seed, stream, static_cast<std::uint64_t>(j) / 2);
    return (j % 2 == 0) ? p.first : p.second;
}

struct MeanSe {
    double mean = 0.0;
    double std_error = 0.0;
};

MeanSe summarize(const std::vector<double>& values) {
    double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n * (n - 1.0)))};
}

// ---------------------------------------------------------------------------
// Complex-plane quadrature.  The integral
//   I(h) = int exp|psi((x+y)/2) - psi((x-y)/2)| dgamma_{h,sigma}(x)
// is evaluated as 1 + int (F - 1) rho_h with F - 1 computed through expm1,
// so the exactly-known Gaussian bulk never passes through the quadrature.
// The increment is rotated so that y sits on the positive real axis (the
// Gaussian weight is rotation invariant); the two singular disks around
// +-|y| are covered by octant-polar panels whose r dtheta Jacobian cancels
// the 1/r blowup of log-type maps, and the remaining plane is tiled by
// Gauss-Legendre boxes graded geometrically away from the singular squares.

struct NodeSet {
    std::vector<double> x1, x2, fw;  // coordinates and (F-1) * weight
    struct Block {
        std::size_t begin = 0, end = 0;
        double cx = 0.0, cy = 0.0, radius = 0.0;
    };
    std::vector<Block> blocks;
};

double spread_minus_one(const PsiSpec& psi, double yr,
                        std::complex<double> x) {
    double d = std::abs(psi.map(0.5 * (x + yr)) - psi.map(0.5 * (x - yr)));
    return std::expm1(d);
}

// Mirror a nonnegative breakpoint list (containing 0 and the box edge) to
// the negative axis and split any gap wider than sigma into equal pieces.
std::vector<double> graded_axis(std::vector<double> pos, double sigma) {
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end(),
                          [](double u, double v) { return v - u < 1e-12; }),
              pos.end());
    std::vector<double> full;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it)
        if (*it > 1e-12) full.push_back(-*it);
    full.insert(full.end(), pos.begin(), pos.end());
    std::vector<double> out{full.front()};
    for (std::size_t i = 1; i < full.size(); ++i) {
        double u = full[i - 1], v = full[i];
        int pieces =
            std::max(1, static_cast<int>(std::ceil((v - u) / sigma - 1e-9)));
        for (int k = 1; k <= pieces; ++k)
            out.push_back(u + (v - u) * k / pieces);
    }
    return out;
}

struct AxisNodes {
    std::vector<double> lo, hi;            // cell bounds
    std::vector<std::vector<double>> x, w; // per-cell nodes and weights
};

AxisNodes axis_nodes(const std::vector<double>& breaks,
                     const std::vector<std::pair<double, double>>& ref) {
    AxisNodes ax;
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        double u = breaks[i - 1], v = breaks[i];
        ax.lo.push_back(u);
        ax.hi.push_back(v);
        std::vector<double> xs, ws;
        for (auto [t, wt] : ref) {
            xs.push_back(u + (v - u) * t);
            ws.push_back((v - u) * wt);
        }
        ax.x.push_back(std::move(xs));
        ax.w.push_back(std::move(ws));
    }
    return ax;
}

NodeSet build_nodes(const PsiSpec& psi, double sigma, double yr, double box,
                    int order) {
    double a = 0.9 * std::min(yr, sigma);
    auto ref = gauss_legendre(order, 0.0, 1.0);

    std::vector<double> p1{0.0, yr - a, yr + a, box};
    for (double w = 2 * a, p = yr + a; w < sigma && p + w < box; w *= 2) {
        p += w;
        p1.push_back(p);
    }
    for (double w = 2 * a, p = yr - a; w < sigma && p - w > 0.0; w *= 2) {
        p -= w;
        p1.push_back(p);
    }
    std::vector<double> p2{0.0, a, box};
    for (double w = 2 * a, p = a; w < sigma && p + w < box; w *= 2) {
        p += w;
        p2.push_back(p);
    }
    AxisNodes ax1 = axis_nodes(graded_axis(std::move(p1), sigma), ref);
    AxisNodes ax2 = axis_nodes(graded_axis(std::move(p2), sigma), ref);

    NodeSet ns;
    const double eps = 1e-9;
    auto in_square = [&](double lo1, double hi1, double lo2, double hi2,
                         double c) {
        return lo1 >= c - a - eps && hi1 <= c + a + eps && lo2 >= -a - eps &&
               hi2 <= a + eps;
    };
    for (std::size_t i = 0; i < ax1.lo.size(); ++i) {
        for (std::size_t j = 0; j < ax2.lo.size(); ++j) {
            if (in_square(ax1.lo[i], ax1.hi[i], ax2.lo[j], ax2.hi[j], yr) ||
                in_square(ax1.lo[i], ax1.hi[i], ax2.lo[j], ax2.hi[j], -yr))
                continue;
            NodeSet::Block b;
            b.begin = ns.fw.size();
            for (std::size_t u = 0; u < ax1.x[i].size(); ++u) {
                for (std::size_t v = 0; v < ax2.x[j].size(); ++v) {
                    std::complex<double> x{ax1.x[i][u], ax2.x[j][v]};
                    ns.x1.push_back(x.real());
                    ns.x2.push_back(x.imag());
                    ns.fw.push_back(spread_minus_one(psi, yr, x) *
                                    ax1.w[i][u] * ax2.w[j][v]);
                }
            }
            b.end = ns.fw.size();
            b.cx = 0.5 * (ax1.lo[i] + ax1.hi[i]);
            b.cy = 0.5 * (ax2.lo[j] + ax2.hi[j]);
            b.radius = 0.5 * std::hypot(ax1.hi[i] - ax1.lo[i],
                                        ax2.hi[j] - ax2.lo[j]);
            ns.blocks.push_back(b);
        }
    }

    // Octant-polar panels over the two singular squares.
    for (double c : {yr, -yr}) {
        NodeSet::Block b;
        b.begin = ns.fw.size();
        for (int oct = 0; oct < 8; ++oct) {
            double tlo = oct * kPi / 4.0;
            for (auto [tt, wt] : ref) {
                double theta = tlo + (kPi / 4.0) * tt;
                double wtheta = (kPi / 4.0) * wt;
                double delta =
                    theta - (kPi / 2.0) * std::round(theta / (kPi / 2.0));
                double rmax = a / std::cos(delta);
                for (auto [tr, wr] : ref) {
                    double r = rmax * tr;
                    std::complex<double> x{c + r * std::cos(theta),
                                           r * std::sin(theta)};
                    ns.x1.push_back(x.real());
                    ns.x2.push_back(x.imag());
                    ns.fw.push_back(spread_minus_one(psi, yr, x) * wtheta *
                                    (rmax * wr) * r);
                }
            }
        }
        b.end = ns.fw.size();
        b.cx = c;
        b.cy = 0.0;
        b.radius = a * 1.4143;
        ns.blocks.push_back(b);
    }
    return ns;
}

// int (F - 1) rho_h over the node set; blocks farther than span*sigma from
// the shift contribute below e^{-span^2} relative and are skipped.
double small_part(const NodeSet& ns, double sigma, double span_sigmas,
                  std::complex<double> h) {
    double reach = span_sigmas * sigma;
    double inv = 1.0 / (sigma * sigma);
    double norm = 1.0 / (kPi * sigma * sigma);
    double total = 0.0;
    for (const auto& b : ns.blocks) {
        double dx = b.cx - h.real(), dy = b.cy - h.imag();
        if (std::sqrt(dx * dx + dy * dy) - b.radius > reach) continue;
        double s = 0.0;
        for (std::size_t i = b.begin; i < b.end; ++i) {
            double u = ns.x1[i] - h.real(), v = ns.x2[i] - h.imag();
            s += ns.fw[i] * std::exp(-(u * u + v * v) * inv);
        }
        total += s;
    }
    return total * norm;
}

double complex_box(const PsiSpec&, double sigma, double yr, double h_reach,
                   double span_sigmas) {
    double a = 0.9 * std::min(yr, sigma);
    return std::max(h_reach + span_sigmas * sigma, yr + a + sigma);
}

// ---------------------------------------------------------------------------
// Real-line integral, adaptive with the singular abscissae as break points.

double real_inner(const PsiSpec& psi, double sigma, double yv, double hv,
                  double span_sigmas, double epsrel) {
    double ay = std::abs(yv);
    double lo = std::min(-ay - 1.0, hv - (span_sigmas + 2.0) * sigma);
    double hi = std::max(ay + 1.0, hv + (span_sigmas + 2.0) * sigma);
    std::vector<double> pts{lo};
    for (double b : {-ay, 0.0, ay})
        if (b > lo + 1e-12 && b < hi - 1e-12) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double u, double v) { return v - u < 1e-12; }),
              pts.end());
    pts.push_back(hi);
    double norm = 1.0 / (sigma * std::sqrt(2.0 * kPi));
    auto f = [&](double x) {
        double d = std::abs(psi.map({0.5 * (x + yv), 0.0}) -
                            psi.map({0.5 * (x - yv), 0.0}));
        double u = (x - hv) / sigma;
        return norm * std::exp(d - 0.5 * u * u);
    };
    try {
        return std::log(integrate_with_breaks(f, pts, 0.0, epsrel));
    } catch (const NonconvergenceError&) {
        throw;
    } catch (const std::runtime_error& e) {
        throw NonconvergenceError(std::string("smeared integral for ") +
                                  psi.name + " did not converge: " + e.what());
    }
}

void require_real_argument(const PsiSpec& psi, std::complex<double> z,
                           const char* what) {
    if (psi.domain == PsiDomain::Real && z.imag() != 0.0)
        throw std::invalid_argument(std::string(what) +
                                    " must be real for a real-domain map");
}

}  // namespace

// ---------------------------------------------------------------------------
// Candidate maps

PsiSpec log_modulus_complex_psi() {
    PsiSpec p;
    p.name = "log-modulus-complex";
    p.domain = PsiDomain::ComplexPlane;
    p.centering = 0.5 * euler_gamma();
    double c = p.centering;
    p.map = [c](std::complex<double> z) { return std::log(std::abs(z)) + c; };
    p.envelope_power = 1.0;
    p.singular_at_zero = true;
    return p;
}

PsiSpec half_log_modulus_real_psi() {
    PsiSpec p;
    p.name = "half-log-modulus-real";
    p.domain = PsiDomain::Real;
    p.centering = 0.5 * beta_real();
    double c = p.centering;
    p.map = [c](std::complex<double> z) {
        return 0.5 * std::log(std::abs(z.real())) + c;
    };
    p.envelope_power = 0.5;
    p.singular_at_zero = true;
    return p;
}

PsiSpec log_modulus_real_psi() {
    PsiSpec p;
    p.name = "log-modulus-real";
    p.domain = PsiDomain::Real;
    p.centering = beta_real();
    double c = p.centering;
    p.map = [c](std::complex<double> z) {
        return std::log(std::abs(z.real())) + c;
    };
    p.envelope_power = 1.0;
    p.singular_at_zero = true;
    return p;
}

PsiSpec sine_psi() {
    PsiSpec p;
    p.name = "sine";
    p.domain = PsiDomain::Real;
    p.map = [](std::complex<double> z) { return std::sin(z.real()); };
    p.envelope_power = 1.0;
    p.lipschitz = 1.0;
    return p;
}

PsiSpec scaled_psi(const PsiSpec& base, double factor) {
    if (factor == 0.0)
        throw std::invalid_argument("scaled_psi needs a nonzero factor");
    PsiSpec p = base;
    p.name = base.name + "-scaled";
    p.centering = base.centering * factor;
    p.map = [f = base.map, factor](std::complex<double> z) {
        return factor * f(z);
    };
    p.lipschitz =
        base.lipschitz >= 0.0 ? std::abs(factor) * base.lipschitz : -1.0;
    return p;
}

double real_log_centering() { return beta_real(); }

// ---------------------------------------------------------------------------
// Centering check

CenteringResult centering_check(const PsiSpec& psi, double tolerance) {
    auto level = [&](int refine) {
        if (psi.domain == PsiDomain::Real) {
            double reach = 12.0 + 2.0 * refine;
            auto f = [&](double x) {
                return psi.map({x, 0.0}) * std::exp(-0.5 * x * x) /
                       std::sqrt(2.0 * kPi);
            };
            return integrate_with_breaks(f, {-reach, 0.0, reach}, 0.0,
                                         1e-11 / (1 + 9 * refine));
        }
        int m = 48 << refine;
        auto f = [&](double r) {
            double avg = 0.0;
            for (int j = 0; j < m; ++j) {
                double theta = (j + 0.5) * 2.0 * kPi / m;
                avg += psi.map(std::polar(r, theta));
            }
            return 2.0 * r * std::exp(-r * r) * avg / m;
        };
        return integrate_upper_infinite(f, 0.0, 1e-13, 1e-11);
    };
    double i1 = level(0), i2 = level(1);
    CenteringResult out;
    out.value = i2;
    out.error_estimate = std::abs(i2 - i1);
    out.pass = std::abs(i2) <= tolerance;
    return out;
}

// ---------------------------------------------------------------------------
// The smeared increment bound g

std::vector<std::complex<double>> make_shift_grid(PsiDomain domain,
                                                  double sigma,
                                                  double extent_sigmas,
                                                  double step_sigmas) {
    if (sigma <= 0.0 || step_sigmas <= 0.0 || extent_sigmas < 0.0)
        throw std::invalid_argument("shift grid needs sigma, step > 0");
    int m = static_cast<int>(std::llround(extent_sigmas / step_sigmas));
    std::vector<std::complex<double>> grid;
    if (domain == PsiDomain::Real) {
        for (int k = -m; k <= m; ++k)
            grid.emplace_back(k * step_sigmas * sigma, 0.0);
    } else {
        for (int k = -m; k <= m; ++k)
            for (int l = -m; l <= m; ++l)
                grid.emplace_back(k * step_sigmas * sigma,
                                  l * step_sigmas * sigma);
    }
    return grid;
}

double smeared_inner(const PsiSpec& psi, double sigma, std::complex<double> y,
                     std::complex<double> h, const SmearedQuadrature& quad) {
    if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
    require_real_argument(psi, y, "increment y");
    require_real_argument(psi, h, "shift h");
    if (std::abs(y) == 0.0) return 0.0;
    if (psi.domain == PsiDomain::Real)
        return real_inner(psi, sigma, y.real(), h.real(), quad.span_sigmas,
                          1e-10);
    double yr = std::abs(y);
    std::complex<double> rot = std::conj(y) / yr;
    std::complex<double> hr = h * rot;
    double box = complex_box(psi, sigma, yr, std::abs(h), quad.span_sigmas);
    NodeSet ns = build_nodes(psi, sigma, yr, box, quad.order);
    return std::log1p(small_part(ns, sigma, quad.span_sigmas, hr));
}

GValue g_of_y(const PsiSpec& psi, double sigma, std::complex<double> y,
              const std::vector<std::complex<double>>& shift_grid,
              const SmearedQuadrature& quad) {
    if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
    if (shift_grid.empty())
        throw std::invalid_argument("shift grid must be nonempty");
    require_real_argument(psi, y, "increment y");
    if (std::abs(y) == 0.0) return {};

    GValue out;
    if (psi.domain == PsiDomain::Real) {
        double best = -std::numeric_limits<double>::infinity();
        std::complex<double> arg;
        for (auto h : shift_grid) {
            require_real_argument(psi, h, "shift h");
            double v =
                real_inner(psi, sigma, y.real(), h.real(), quad.span_sigmas,
                           1e-9);
            if (v > best) {
                best = v;
                arg = h;
            }
        }
        double refined = real_inner(psi, sigma, y.real(), arg.real(),
                                    quad.span_sigmas + 2.0, 1e-11);
        double denom = std::max({std::abs(refined), std::abs(best), 1e-12});
        out.refinement_error = std::abs(refined - best) / denom;
        if (out.refinement_error > quad.refine_rel_tol)
            throw NonconvergenceError("smeared bound for " + psi.name +
                                      " drifted under refinement");
        out.value = std::max(0.0, refined);
        out.shift = arg;
        return out;
    }

    double yr = std::abs(y);
    std::complex<double> rot = std::conj(y) / yr;
    double h_reach = 0.0;
    for (auto h : shift_grid) h_reach = std::max(h_reach, std::abs(h));
    double box = complex_box(psi, sigma, yr, h_reach, quad.span_sigmas);

    NodeSet base = build_nodes(psi, sigma, yr, box, quad.order);
    double best = -std::numeric_limits<double>::infinity();
    double second = -std::numeric_limits<double>::infinity();
    std::complex<double> arg;
    for (auto h : shift_grid) {
        double t = small_part(base, sigma, quad.span_sigmas, h * rot);
        if (t > best) {
            second = best;
            best = t;
            arg = h;
        } else {
            second = std::max(second, t);
        }
    }
    NodeSet fine = build_nodes(psi, sigma, yr, box, 2 * quad.order);
    double refined = small_part(fine, sigma, quad.span_sigmas, arg * rot);
    double g_base = std::log1p(best), g_ref = std::log1p(refined);
    double denom = std::max({std::abs(g_ref), std::abs(g_base), 1e-12});
    out.refinement_error = std::abs(g_ref - g_base) / denom;
    if (out.refinement_error > quad.refine_rel_tol)
        throw NonconvergenceError("smeared bound for " + psi.name +
                                  " drifted under refinement");
    double top = std::max(refined, shift_grid.size() > 1 ? second : refined);
    out.value = std::max(0.0, std::log1p(top));
    out.shift = arg;
    return out;
}

// ---------------------------------------------------------------------------
// Envelope fit

GBoundResult smeared_constant(const PsiSpec& psi,
                              const std::vector<double>& y_grid, double sigma,
                              const SmearedQuadrature& quad,
                              double shift_extent_sigmas,
                              double shift_step_sigmas) {
    if (y_grid.size() < 4)
        throw std::invalid_argument("increment grid needs at least 4 points");
    for (std::size_t i = 0; i < y_grid.size(); ++i) {
        if (y_grid[i] <= 0.0)
            throw std::invalid_argument("increments must be positive");
        if (i > 0 && y_grid[i] <= y_grid[i - 1])
            throw std::invalid_argument("increments must be ascending");
    }
    if (y_grid.back() / y_grid.front() < 1e3 * (1.0 - 1e-9))
        throw std::invalid_argument(
            "increment grid must span at least three decades");

    auto grid = make_shift_grid(psi.domain, sigma, shift_extent_sigmas,
                                shift_step_sigmas);
    const double inf = std::numeric_limits<double>::infinity();

    GBoundResult out;
    out.y = y_grid;
    out.envelope_power = psi.envelope_power;
    out.sigma = sigma;
    out.shift_count = static_cast<int>(grid.size());
    out.quadrature_order = quad.order;
    bool diverged = false;
    for (double y : y_grid) {
        double g;
        try {
            g = g_of_y(psi, sigma, {y, 0.0}, grid, quad).value;
        } catch (const NonconvergenceError&) {
            g = inf;
            diverged = true;
        }
        out.g.push_back(g);
        out.ratio.push_back(g / std::pow(y, psi.envelope_power));
    }

    std::size_t imax = 0;
    double finite_max = 0.0;
    for (std::size_t i = 0; i < out.ratio.size(); ++i) {
        if (out.ratio[i] > out.ratio[imax]) imax = i;
        if (std::isfinite(out.ratio[i]))
            finite_max = std::max(finite_max, out.ratio[i]);
    }
    out.fitted_constant = finite_max;

    double rest_max = 0.0;
    for (std::size_t i = 2; i < out.ratio.size(); ++i)
        if (std::isfinite(out.ratio[i]))
            rest_max = std::max(rest_max, out.ratio[i]);
    bool small_y_blowup =
        imax <= 1 && out.ratio[imax] > 1.5 * rest_max;
    out.bounded = !diverged && !small_y_blowup;
    return out;
}

// ---------------------------------------------------------------------------
// Lattice covariance and the noisy-Gaussian test

HermitianMatrix lattice_covariance(const KernelSpec& kernel, double spacing,
                                   int count_per_axis,
                                   std::array<double, 2> offset) {
    if (spacing <= 0.0 || count_per_axis < 1)
        throw std::invalid_argument("lattice needs spacing > 0 and count >= 1");

    if (kernel.kind == KernelKind::PlanarAnalytic) {
        int n = count_per_axis;
        HermitianMatrix sigma(n * n);
        std::vector<std::array<double, 2>> p;
        p.reserve(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                p.push_back({spacing * (i + offset[0]),
                             spacing * (j + offset[1])});
        for (int j = 0; j < n * n; ++j) {
            for (int k = 0; k < n * n; ++k) {
                double wedge = p[j][0] * p[k][1] - p[j][1] * p[k][0];
                double d0 = p[j][0] - p[k][0], d1 = p[j][1] - p[k][1];
                sigma.at(j, k) = std::exp(std::complex<double>(
                    -0.5 * (d0 * d0 + d1 * d1), -wedge));
            }
        }
        return sigma;
    }

    if (kernel.dim == 1 && !kernel.complex_valued && kernel.stationary()) {
        int n = count_per_axis;
        double reach = kernel.truncation_radius(1e-12);
        std::vector<double> corr(static_cast<std::size_t>(n));
        for (int m = 0; m < n; ++m) {
            double d = spacing * m;
            auto f = [&](double x) {
                return kernel.radial(std::abs(x)) *
                       kernel.radial(std::abs(x - d));
            };
            std::vector<double> pts{-reach, 0.0};
            if (d > 1e-12) pts.push_back(d);
            pts.push_back(d + reach);
            corr[static_cast<std::size_t>(m)] =
                integrate_with_breaks(f, pts, 0.0, 1e-11);
        }
        HermitianMatrix sigma(n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                sigma.at(j, k) = corr[static_cast<std::size_t>(
                                     std::abs(j - k))] /
                                 corr[0];
        return sigma;
    }

    throw std::invalid_argument(
        "lattice covariance supports the planar analytic kernel and "
        "one-dimensional stationary kernels");
}

NoisyCheckResult noisy_gaussian_check(const HermitianMatrix& sigma,
                                      double epsilon, double spacing) {
    if (epsilon < 0.0)
        throw std::invalid_argument("epsilon must be nonnegative");
    int n = sigma.n;
    if (n < 1 || sigma.data.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("covariance matrix is malformed");
    for (int j = 0; j < n; ++j) {
        if (std::abs(sigma.at(j, j) - 1.0) > 1e-12)
            throw std::invalid_argument(
                "covariance must have unit diagonal");
        for (int k = 0; k < n; ++k)
            if (std::abs(sigma.at(j, k) - std::conj(sigma.at(k, j))) > 1e-12)
                throw std::invalid_argument("covariance must be Hermitian");
    }

    double amp = (1.0 + epsilon) * (1.0 + epsilon);
    Eigen::MatrixXcd m(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            m(j, k) = amp * sigma.at(j, k) -
                      (j == k ? 1.0 : 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m,
                                                       Eigen::EigenvaluesOnly);

    NoisyCheckResult out;
    out.spacing = spacing;
    out.epsilon = epsilon;
    out.size = n;
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    out.pass = out.min_eigenvalue >= -1e-10;
    return out;
}

// ---------------------------------------------------------------------------
// Product inequalities by Monte Carlo

namespace {

Eigen::MatrixXd gaussian_factor(const HermitianMatrix& cov) {
    int n = cov.n;
    if (n < 1 || cov.data.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("covariance matrix is malformed");
    Eigen::MatrixXd c(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            if (std::abs(cov.at(j, k).imag()) > 1e-12)
                throw std::invalid_argument("covariance must be real");
            c(j, k) = cov.at(j, k).real();
        }
    }
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("covariance must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw std::invalid_argument(
            "covariance must be positive semidefinite");
    return es.eigenvectors() *
           es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

ProductInequalityResult noisy_product_inequality_mc(
    const HermitianMatrix& y_covariance,
    const std::vector<BoundedFactor>& factors, int n_samples,
    std::uint64_t seed) {
    int k = y_covariance.n;
    if (static_cast<int>(factors.size()) != k)
        throw std::invalid_argument(
            "one bounded factor per coordinate is required");
    if (n_samples < 2)
        throw std::invalid_argument("need at least two samples");
    Eigen::MatrixXd l = gaussian_factor(y_covariance);

    std::vector<double> prod(static_cast<std::size_t>(n_samples));
    Eigen::VectorXd g(k);
    for (int s = 0; s < n_samples; ++s) {
        auto stream = static_cast<std::uint64_t>(s);
        for (int j = 0; j < k; ++j)
            g(j) = normal_component(seed, 2 * stream, j);
        Eigen::VectorXd y = l * g;
        double value = 1.0;
        for (int j = 0; j < k; ++j) {
            double x = y(j) + normal_component(seed, 2 * stream + 1, j);
            value *= factors[static_cast<std::size_t>(j)].f(x);
        }
        prod[static_cast<std::size_t>(s)] = value;
    }
    MeanSe lhs = summarize(prod);

    ProductInequalityResult out;
    out.lhs = lhs.mean;
    out.lhs_std_error = lhs.std_error;
    out.rhs = 1.0;
    for (const auto& f : factors) out.rhs *= f.sup_mean;
    out.rhs_std_error = 0.0;
    out.n = n_samples;
    out.pass = out.lhs <= out.rhs + 3.0 * out.lhs_std_error;
    return out;
}

ProductInequalityResult smeared_pair_inequality_mc(
    const PsiSpec& psi, const std::function<double(double)>& g_bound,
    const HermitianMatrix& y_covariance, double shift_scale, int n_samples,
    std::uint64_t seed) {
    if (psi.domain != PsiDomain::Real)
        throw std::invalid_argument("pair inequality needs a real-domain map");
    if (shift_scale <= 0.0)
        throw std::invalid_argument("shift scale must be positive");
    if (n_samples < 2)
        throw std::invalid_argument("need at least two samples");
    int k = y_covariance.n;
    Eigen::MatrixXd l = gaussian_factor(y_covariance);

    std::vector<double> lhs_vals(static_cast<std::size_t>(n_samples));
    std::vector<double> rhs_vals(static_cast<std::size_t>(n_samples));
    Eigen::VectorXd g(k);
    for (int s = 0; s < n_samples; ++s) {
        auto stream = static_cast<std::uint64_t>(s);
        for (int j = 0; j < k; ++j)
            g(j) = normal_component(seed, 3 * stream, j);
        Eigen::VectorXd y = l * g;
        double lsum = 0.0, rsum = 0.0;
        for (int j = 0; j < k; ++j) {
            double x = y(j) + normal_component(seed, 3 * stream + 1, j);
            double shift =
                shift_scale * normal_component(seed, 3 * stream + 2, j);
            lsum += std::abs(psi.map({x + shift, 0.0}) -
                             psi.map({x - shift, 0.0}));
            rsum += g_bound(shift);
        }
        lhs_vals[static_cast<std::size_t>(s)] = std::exp(lsum);
        rhs_vals[static_cast<std::size_t>(s)] = std::exp(rsum);
    }
    MeanSe lhs = summarize(lhs_vals);
    MeanSe rhs = summarize(rhs_vals);

    ProductInequalityResult out;
    out.lhs = lhs.mean;
    out.lhs_std_error = lhs.std_error;
    out.rhs = rhs.mean;
    out.rhs_std_error = rhs.std_error;
    out.n = n_samples;
    out.pass =
        out.lhs <= out.rhs + 3.0 * (out.lhs_std_error + out.rhs_std_error);
    return out;
}

// ---------------------------------------------------------------------------
// Explicit two-function family

CounterexampleProfile counterexample_profile(int exponent, double epsilon,
                                             int n_samples,
                                             std::uint64_t seed) {
    if (exponent < 1)
        throw std::invalid_argument("exponent must be at least 1");
    if (!(epsilon > 0.0) || epsilon >= std::exp(-4.0 / 3.0))
        throw std::invalid_argument(
            "epsilon must lie in (0, exp(-4/3))");

    CounterexampleProfile out;
    out.exponent = exponent;
    out.epsilon = epsilon;
    double big_l = std::log(1.0 / epsilon);
    out.a = std::pow(big_l / 4.0, 1.0 / exponent);
    out.b = std::pow(3.0 * big_l / 4.0, 1.0 / exponent);
    out.floor_constant = std::log(4.0 + 2.0 * std::pow(epsilon, 0.25));
    out.log_gap_floor = big_l / 4.0 - out.floor_constant;
    out.lower_bound = (out.b - out.a) * out.log_gap_floor;
    double em = -std::expm1(-epsilon * epsilon);
    out.probability_exact = em * em * std::exp(-1.0);

    if (n_samples > 0) {
        long hits = 0;
        for (int s = 0; s < n_samples; ++s) {
            auto idx = static_cast<std::uint64_t>(s);
            bool in_a = std::abs(complex_normal(seed, 0, idx)) <= epsilon &&
                        std::abs(complex_normal(seed, 1, idx)) <= epsilon &&
                        std::abs(complex_normal(seed, 2, idx)) >= 1.0;
            if (in_a) ++hits;
        }
        double n = n_samples;
        double p = hits / n;
        out.probability_mc = p;
        out.probability_std_error = std::sqrt(p * (1.0 - p) / n);
        double e4 = std::pow(epsilon, 4.0);
        out.scaled_probability_mc = p / e4;
        out.n_samples = n_samples;
    }
    return out;
}

}  // namespace fieldsim
