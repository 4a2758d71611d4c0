#pragma once

// Synthesis kernels phi used to build Gaussian fields from white noise.
// Stationary kernels are radial profiles phi(|t-s|) normalised to unit L2
// energy; the planar analytic-function kernel is complex-valued and
// nonstationary but has unit-energy rows.

#include <complex>
#include <functional>
#include <vector>

namespace fieldsim {

enum class KernelKind { PowerDecay, Gaussian, PlanarAnalytic, Custom };

struct KernelSpec {
    KernelKind kind = KernelKind::Gaussian;
    int dim = 2;
    bool complex_valued = false;
    double alpha = 0.0;       // power-decay exponent
    double width = 1.0;       // gaussian width parameter
    double normalizer = 1.0;  // amplitude c multiplying the radial shape
    std::function<double(double)> custom_shape;  // unnormalised radial shape

    bool stationary() const { return kind != KernelKind::PlanarAnalytic; }

    // Radial profile phi(r) for stationary kernels; for the planar-analytic
    // kernel this is the modulus profile |phi(t,s)| at |t-s| = r.
    double radial(double r) const;

    // Two-point value phi(t, s); stationary kernels reduce to radial(|t-s|).
    std::complex<double> evaluate(const std::array<double, 2>& t,
                                  const std::array<double, 2>& s) const;

    // Smallest radius R with L2 mass of phi outside |u| > R below tail_tol
    // (relative to the unit total).
    double truncation_radius(double tail_tol) const;

    // L2 energy by quadrature; ~1 for all constructed kernels.
    double l2_energy() const;

    // L2 mass outside radius R (relative to unit total).
    double l2_tail(double radius) const;
};

// phi(t) = c (1+|t|)^{-alpha/2} with c making the L2 energy 1.
// Throws std::invalid_argument unless alpha > dim.
KernelSpec power_decay_kernel(double alpha, int dim);

// phi(t) = c exp(-|t|^2 / (2 width^2)) with unit L2 energy.
KernelSpec gaussian_kernel(double width, int dim);

// Kernel of the planar Gaussian analytic function:
//   phi(t, s) = pi^{-1/2} exp(-i (t1 s2 - t2 s1) - |t-s|^2 / 2).
KernelSpec planar_analytic_kernel();
std::complex<double> planar_analytic_kernel_value(const std::array<double, 2>& t,
                                                  const std::array<double, 2>& s);

// Arbitrary radial shape, normalised numerically to unit L2 energy
// (verified to relative error < 1e-6).
KernelSpec custom_kernel(std::function<double(double)> shape, int dim);

// Row/column phase factors tau1(r, t), tau2(r, s) describing how a kernel
// transforms under a common shift of both arguments by r.
struct PhaseSpec {
    std::function<std::complex<double>(const std::array<double, 2>&,
                                       const std::array<double, 2>&)>
        tau1, tau2;
};

// Phases of the planar-analytic kernel: tau1 = exp(i r^t), tau2 = exp(-i r^s)
// with r^t = r1 t2 - r2 t1.
PhaseSpec planar_analytic_phases();

// Max over shifts and (t, s) pairs of
//   | phi(t+r, s+r) - tau1(r,t) phi(t,s) tau2(r,s) |.
double verify_phase_covariance(
    const KernelSpec& kernel, const PhaseSpec& phases,
    const std::vector<std::array<double, 2>>& shifts,
    const std::vector<std::pair<std::array<double, 2>, std::array<double, 2>>>&
        sample_pairs);

}  // namespace fieldsim
