#include "fieldsim/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fieldsim/quadrature.hpp"

namespace fieldsim {
namespace {

constexpr double kPi = std::numbers::pi;

double shape_value(const KernelSpec& k, double r) {
    switch (k.kind) {
        case KernelKind::PowerDecay:
            return std::pow(1.0 + r, -k.alpha / 2.0);
        case KernelKind::Gaussian:
            return std::exp(-r * r / (2.0 * k.width * k.width));
        case KernelKind::PlanarAnalytic:
            return std::exp(-r * r / 2.0);
        case KernelKind::Custom:
            return k.custom_shape(r);
    }
    return 0.0;
}

double energy_integrand(const KernelSpec& k, double r) {
    const double p = k.normalizer * shape_value(k, r);
    return k.dim == 2 ? 2.0 * kPi * r * p * p : 2.0 * p * p;
}

void verify_unit_energy(const KernelSpec& k) {
    const double e = k.l2_energy();
    if (std::abs(e - 1.0) > 1e-6)
        throw std::logic_error("kernel normalization failed: L2 energy " +
                               std::to_string(e));
}

}  // namespace

double KernelSpec::radial(double r) const {
    return normalizer * shape_value(*this, r);
}

std::complex<double> KernelSpec::evaluate(const std::array<double, 2>& t,
                                          const std::array<double, 2>& s) const {
    const double dx = t[0] - s[0];
    const double dy = t[1] - s[1];
    const double r = dim == 2 ? std::hypot(dx, dy) : std::abs(dx);
    if (kind != KernelKind::PlanarAnalytic) return {radial(r), 0.0};
    const double wedge = t[0] * s[1] - t[1] * s[0];
    return std::polar(radial(r), -wedge);
}

double KernelSpec::l2_energy() const {
    return integrate_upper_infinite([this](double r) { return energy_integrand(*this, r); },
                                    0.0, 0.0, 1e-10);
}

double KernelSpec::l2_tail(double radius) const {
    if (radius <= 0.0) return 1.0;
    return integrate_upper_infinite(
        [this](double r) { return energy_integrand(*this, r); }, radius, 1e-14,
        1e-10);
}

double KernelSpec::truncation_radius(double tail_tol) const {
    if (!(tail_tol > 0.0) || tail_tol >= 1.0)
        throw std::invalid_argument("tail_tol must be in (0,1)");
    double hi = 1.0;
    while (l2_tail(hi) > tail_tol) {
        hi *= 2.0;
        if (hi > 1e9)
            throw std::runtime_error("kernel tail does not reach tolerance");
    }
    double lo = hi / 2.0;
    if (hi == 1.0) lo = 0.0;
    for (int iter = 0; iter < 60 && hi - lo > 1e-4 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (l2_tail(mid) > tail_tol ? lo : hi) = mid;
    }
    return hi;
}

KernelSpec power_decay_kernel(double alpha, int dim) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("dim must be 1 or 2");
    if (!(alpha > dim))
        throw std::invalid_argument("power-decay kernel requires alpha > dim");
    KernelSpec k;
    k.kind = KernelKind::PowerDecay;
    k.dim = dim;
    k.alpha = alpha;
    // closed-form L2 normalizer:
    //   dim 2: int 2 pi r (1+r)^-alpha dr = 2 pi / ((alpha-1)(alpha-2))
    //   dim 1: int_R (1+|t|)^-alpha dt    = 2 / (alpha-1)
    k.normalizer = dim == 2
                       ? std::sqrt((alpha - 1.0) * (alpha - 2.0) / (2.0 * kPi))
                       : std::sqrt((alpha - 1.0) / 2.0);
    verify_unit_energy(k);
    return k;
}

KernelSpec gaussian_kernel(double width, int dim) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("dim must be 1 or 2");
    if (!(width > 0.0)) throw std::invalid_argument("width must be positive");
    KernelSpec k;
    k.kind = KernelKind::Gaussian;
    k.dim = dim;
    k.width = width;
    k.normalizer = dim == 2 ? 1.0 / (width * std::sqrt(kPi))
                            : 1.0 / std::sqrt(width * std::sqrt(kPi));
    verify_unit_energy(k);
    return k;
}

KernelSpec planar_analytic_kernel() {
    KernelSpec k;
    k.kind = KernelKind::PlanarAnalytic;
    k.dim = 2;
    k.complex_valued = true;
    k.normalizer = 1.0 / std::sqrt(kPi);
    verify_unit_energy(k);
    return k;
}

std::complex<double> planar_analytic_kernel_value(
    const std::array<double, 2>& t, const std::array<double, 2>& s) {
    static const KernelSpec k = planar_analytic_kernel();
    return k.evaluate(t, s);
}

KernelSpec custom_kernel(std::function<double(double)> shape, int dim) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("dim must be 1 or 2");
    KernelSpec k;
    k.kind = KernelKind::Custom;
    k.dim = dim;
    k.custom_shape = std::move(shape);
    k.normalizer = 1.0;
    const double energy = k.l2_energy();
    if (!(energy > 0.0) || !std::isfinite(energy))
        throw std::invalid_argument("custom kernel shape is not L2 normalizable");
    k.normalizer = 1.0 / std::sqrt(energy);
    verify_unit_energy(k);
    return k;
}

PhaseSpec planar_analytic_phases() {
    PhaseSpec p;
    p.tau1 = [](const std::array<double, 2>& r, const std::array<double, 2>& t) {
        return std::polar(1.0, r[0] * t[1] - r[1] * t[0]);
    };
    p.tau2 = [](const std::array<double, 2>& r, const std::array<double, 2>& s) {
        return std::polar(1.0, -(r[0] * s[1] - r[1] * s[0]));
    };
    return p;
}

double verify_phase_covariance(
    const KernelSpec& kernel, const PhaseSpec& phases,
    const std::vector<std::array<double, 2>>& shifts,
    const std::vector<std::pair<std::array<double, 2>, std::array<double, 2>>>&
        sample_pairs) {
    double worst = 0.0;
    for (const auto& r : shifts) {
        for (const auto& [t, s] : sample_pairs) {
            const std::array<double, 2> tr{t[0] + r[0], t[1] + r[1]};
            const std::array<double, 2> sr{s[0] + r[0], s[1] + r[1]};
            const std::complex<double> lhs = kernel.evaluate(tr, sr);
            const std::complex<double> rhs =
                phases.tau1(r, t) * kernel.evaluate(t, s) * phases.tau2(r, s);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

}  // namespace fieldsim
