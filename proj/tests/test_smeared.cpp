#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fieldsim/constants.hpp"
#include "fieldsim/kernel.hpp"
#include "fieldsim/quadrature.hpp"
#include "fieldsim/smeared.hpp"

using namespace fieldsim;

namespace {

double phi_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

const std::vector<double> kThreeDecades{1e-3,    3.162e-3, 1e-2, 3.162e-2,
                                        1e-1,    3.162e-1, 1.0};

}  // namespace

TEST_CASE("candidate maps are centred against their reference measures") {
    for (const PsiSpec& psi :
         {log_modulus_complex_psi(), half_log_modulus_real_psi(),
          log_modulus_real_psi(), sine_psi(),
          scaled_psi(log_modulus_complex_psi(), 0.25),
          scaled_psi(half_log_modulus_real_psi(), 2.0)}) {
        CAPTURE(psi.name);
        CenteringResult c = centering_check(psi);
        CHECK(c.pass);
        CHECK(std::abs(c.value) <= 1e-9);
        CHECK(c.error_estimate <= 1e-9);
    }

    // The real centering constant is the negated Gaussian mean of log|u|.
    CHECK(real_log_centering() == beta_real());
    double minus_beta = integrate_with_breaks(
        [](double x) { return std::log(std::abs(x)) * phi_pdf(x); },
        {-14.0, 0.0, 14.0}, 0.0, 1e-12);
    CHECK(minus_beta ==
          doctest::Approx(-real_log_centering()).epsilon(1e-12));

    CHECK_THROWS_AS(scaled_psi(sine_psi(), 0.0), std::invalid_argument);
}

TEST_CASE("smeared integrals at the origin shift match independent values") {
    PsiSpec cl = log_modulus_complex_psi();
    PsiSpec hl = half_log_modulus_real_psi();

    const std::vector<std::pair<double, double>> complex_ref{
        {0.25, 0.5663011572552},
        {0.5, 0.9072138489170},
        {1.0, 1.0848572224261},
        {2.0, 0.6901027818097}};
    for (auto [y, ref] : complex_ref) {
        CAPTURE(y);
        CHECK(smeared_inner(cl, 1.0, {y, 0.0}, {0.0, 0.0}) ==
              doctest::Approx(ref).epsilon(1e-8));
    }

    const std::vector<std::pair<double, double>> real_ref{
        {0.25, 0.6380902797119072},
        {0.5, 0.8675385427782859},
        {1.0, 0.9765026717439991},
        {2.0, 0.6611607374652472}};
    for (auto [y, ref] : real_ref) {
        CAPTURE(y);
        CHECK(smeared_inner(hl, 1.0, {y, 0.0}, {0.0, 0.0}) ==
              doctest::Approx(ref).epsilon(1e-8));
    }

    // Not monotone in the increment: the value peaks near |y| = 1 and falls
    // again as the increment outruns the Gaussian bulk.
    auto at = [&](const PsiSpec& p, double y) {
        return smeared_inner(p, 1.0, {y, 0.0}, {0.0, 0.0});
    };
    CHECK(at(cl, 1.0) > at(cl, 0.25));
    CHECK(at(cl, 1.0) > at(cl, 2.0));
    CHECK(at(hl, 1.0) > at(hl, 0.25));
    CHECK(at(hl, 1.0) > at(hl, 2.0));

    // Zero increment gives exactly zero.
    CHECK(smeared_inner(cl, 1.0, {0.0, 0.0}, {0.3, -0.2}) == 0.0);
    CHECK(smeared_inner(hl, 1.0, {0.0, 0.0}, {0.8, 0.0}) == 0.0);

    // A Lipschitz map obeys the pointwise increment cap |psi'|_inf * |y|.
    PsiSpec sn = sine_psi();
    for (double y : {0.3, 0.7, 1.4, 5.0}) {
        CAPTURE(y);
        CHECK(smeared_inner(sn, 1.0, {y, 0.0}, {1.2, 0.0}) <=
              std::min(2.0, y) + 1e-12);
    }

    CHECK_THROWS_AS(smeared_inner(hl, 1.0, {0.5, 0.1}, {0.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(smeared_inner(hl, 1.0, {0.5, 0.0}, {0.0, 0.3}),
                    std::invalid_argument);
    CHECK_THROWS_AS(smeared_inner(cl, 0.0, {0.5, 0.0}, {0.0, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("the shift supremum dominates the origin value and is even") {
    PsiSpec cl = log_modulus_complex_psi();
    PsiSpec hl = half_log_modulus_real_psi();
    auto real_grid = make_shift_grid(PsiDomain::Real, 1.0);
    auto full_grid = make_shift_grid(PsiDomain::ComplexPlane, 1.0);
    CHECK(real_grid.size() == 49);
    CHECK(full_grid.size() == 2401);

    // Real map, full shift grid: the best shift strictly beats h = 0.
    GValue gr = g_of_y(hl, 1.0, {1.0, 0.0}, real_grid);
    CHECK(gr.value > smeared_inner(hl, 1.0, {1.0, 0.0}, {0.0, 0.0}));
    CHECK(gr.value == doctest::Approx(0.9825660816).epsilon(1e-6));
    CHECK(gr.refinement_error <= 0.01);
    CHECK(std::abs(gr.shift.real()) == doctest::Approx(0.75).epsilon(1e-12));

    // Complex map, full planar grid.
    GValue gc = g_of_y(cl, 1.0, {1.0, 0.0}, full_grid);
    CHECK(gc.value > smeared_inner(cl, 1.0, {1.0, 0.0}, {0.0, 0.0}));
    CHECK(gc.value == doctest::Approx(1.3349659685).epsilon(1e-6));
    CHECK(std::abs(gc.shift) == doctest::Approx(1.25).epsilon(1e-12));

    // Even in the increment, and invariant under rotating the increment by a
    // symmetry of the shift grid.
    auto coarse = make_shift_grid(PsiDomain::ComplexPlane, 1.0, 3.0, 1.0);
    std::complex<double> y{0.3, 0.4};
    double gp = g_of_y(cl, 1.0, y, coarse).value;
    CHECK(gp == doctest::Approx(g_of_y(cl, 1.0, -y, coarse).value)
                    .epsilon(1e-12));
    double gx = g_of_y(cl, 1.0, {0.5, 0.0}, coarse).value;
    double gy = g_of_y(cl, 1.0, {0.0, 0.5}, coarse).value;
    CHECK(gx == doctest::Approx(gy).epsilon(1e-12));

    // Zero increment short-circuits to zero.
    GValue g0 = g_of_y(cl, 1.0, {0.0, 0.0}, coarse);
    CHECK(g0.value == 0.0);
    CHECK(g0.refinement_error == 0.0);

    CHECK_THROWS_AS(g_of_y(cl, 1.0, {0.5, 0.0}, {}), std::invalid_argument);
}

TEST_CASE("scaling a map down scales its smeared bound at least as fast") {
    PsiSpec cl = log_modulus_complex_psi();
    auto coarse = make_shift_grid(PsiDomain::ComplexPlane, 1.0, 3.0, 1.0);
    std::complex<double> y{0.3, 0.4};
    double base = g_of_y(cl, 1.0, y, coarse).value;
    double quarter = g_of_y(scaled_psi(cl, 0.25), 1.0, y, coarse).value;
    CHECK(quarter <= base / 4.0 + 1e-12);
    CHECK(quarter > 0.0);

    PsiSpec hl = half_log_modulus_real_psi();
    auto real_grid = make_shift_grid(PsiDomain::Real, 1.0);
    double rbase = g_of_y(hl, 1.0, {0.8, 0.0}, real_grid).value;
    double rhalf = g_of_y(scaled_psi(hl, 0.5), 1.0, {0.8, 0.0},
                          real_grid).value;
    CHECK(rhalf <= rbase / 2.0 + 1e-12);
}

TEST_CASE("envelope fits separate bounded maps from the divergent one") {
    // Complex log-modulus: linear envelope with a finite constant.
    GBoundResult cres =
        smeared_constant(log_modulus_complex_psi(), kThreeDecades);
    CHECK(cres.bounded);
    CHECK(cres.fitted_constant > 2.0);
    CHECK(cres.fitted_constant < 3.0);
    CHECK(cres.shift_count == 2401);
    for (std::size_t i = 0; i < cres.g.size(); ++i) {
        CAPTURE(i);
        CHECK(std::isfinite(cres.g[i]));
        CHECK(cres.g[i] > 0.0);
        CHECK(cres.ratio[i] ==
              doctest::Approx(cres.g[i] / cres.y[i]).epsilon(1e-12));
    }

    // Real half-log: square-root envelope with a finite constant.
    GBoundResult hres =
        smeared_constant(half_log_modulus_real_psi(), kThreeDecades);
    CHECK(hres.bounded);
    CHECK(hres.envelope_power == 0.5);
    CHECK(hres.fitted_constant > 1.0);
    CHECK(hres.fitted_constant < 1.5);

    // Sine: Lipschitz, so the linear envelope constant stays below 1.
    GBoundResult sres = smeared_constant(sine_psi(), kThreeDecades);
    CHECK(sres.bounded);
    CHECK(sres.fitted_constant <= 1.0 + 1e-9);

    // Full-strength real log-modulus: the integral diverges at every
    // increment and the verdict is unbounded.
    GBoundResult rres = smeared_constant(log_modulus_real_psi(),
                                         kThreeDecades);
    CHECK_FALSE(rres.bounded);
    CHECK(rres.fitted_constant == 0.0);
    for (double r : rres.ratio) CHECK(std::isinf(r));

    CHECK_THROWS_AS(
        smeared_constant(sine_psi(), std::vector<double>{0.1, 0.3, 1.0, 3.0}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        smeared_constant(sine_psi(), std::vector<double>{1e-3, 1e-2, 1.0}),
        std::invalid_argument);
    CHECK_THROWS_AS(smeared_constant(sine_psi(),
                                     std::vector<double>{1e-3, 1e-3, 1e-2,
                                                         1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(smeared_constant(sine_psi(),
                                     std::vector<double>{-1.0, 1e-3, 1e-2,
                                                         1.0}),
                    std::invalid_argument);
}

TEST_CASE("real-line divergence surfaces as a nonconvergence error") {
    auto grid = make_shift_grid(PsiDomain::Real, 1.0);
    CHECK_THROWS_AS(
        g_of_y(log_modulus_real_psi(), 1.0, {0.5, 0.0}, grid),
        NonconvergenceError);
}

TEST_CASE("lattice covariance matches closed forms on both kernel routes") {
    // Planar analytic kernel: exp(-i wedge - half squared distance).
    HermitianMatrix s = lattice_covariance(planar_analytic_kernel(), 1.0, 2);
    CHECK(s.n == 4);
    std::complex<double> expect =
        std::exp(std::complex<double>(-1.0, -1.0));
    CHECK(s.at(2, 1).real() == doctest::Approx(expect.real()).epsilon(1e-14));
    CHECK(s.at(2, 1).imag() == doctest::Approx(expect.imag()).epsilon(1e-14));
    CHECK(s.at(1, 2) == std::conj(s.at(2, 1)));
    for (int j = 0; j < s.n; ++j) CHECK(s.at(j, j) == 1.0);

    // Offsets shift every node; the diagonal stays unit and the magnitude
    // depends only on the node separation.
    HermitianMatrix so =
        lattice_covariance(planar_analytic_kernel(), 1.0, 2, {0.5, 0.5});
    CHECK(std::abs(so.at(2, 1)) ==
          doctest::Approx(std::abs(s.at(2, 1))).epsilon(1e-14));
    CHECK(so.at(0, 0) == 1.0);

    // One-dimensional Gaussian kernel: autocorrelation e^{-d^2/4} at unit
    // width, checked against the analytic value on two separations.
    HermitianMatrix g = lattice_covariance(gaussian_kernel(1.0, 1), 2.0, 3);
    CHECK(g.n == 3);
    CHECK(g.at(0, 0).real() == 1.0);
    CHECK(g.at(0, 1).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
    CHECK(g.at(0, 2).real() == doctest::Approx(std::exp(-4.0)).epsilon(1e-9));
    CHECK(g.at(2, 0).real() == g.at(0, 2).real());

    // Power-decay kernel: positive, strictly decreasing correlations.
    HermitianMatrix p = lattice_covariance(power_decay_kernel(7.0, 1), 1.0, 4);
    CHECK(p.at(0, 1).real() > p.at(0, 2).real());
    CHECK(p.at(0, 2).real() > p.at(0, 3).real());
    CHECK(p.at(0, 3).real() > 0.0);

    CHECK_THROWS_AS(lattice_covariance(gaussian_kernel(1.0, 2), 1.0, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(lattice_covariance(gaussian_kernel(1.0, 1), 0.0, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(lattice_covariance(gaussian_kernel(1.0, 1), 1.0, 0),
                    std::invalid_argument);
}

TEST_CASE("noisy-amplification test separates fine from coarse lattices") {
    const double eps = std::numbers::sqrt2 - 1.0;
    KernelSpec gef = planar_analytic_kernel();

    // Identity covariance at zero amplification sits exactly on the
    // boundary.
    HermitianMatrix id(3);
    for (int j = 0; j < 3; ++j) id.at(j, j) = 1.0;
    NoisyCheckResult boundary = noisy_gaussian_check(id, 0.0);
    CHECK(boundary.pass);
    CHECK(boundary.min_eigenvalue == doctest::Approx(0.0).epsilon(1e-14));

    // Wide spacing: amplification by sqrt2 leaves room for unit noise.
    NoisyCheckResult fine =
        noisy_gaussian_check(lattice_covariance(gef, 3.0, 5), eps, 3.0);
    CHECK(fine.pass);
    CHECK(fine.size == 25);
    CHECK(fine.spacing == 3.0);
    CHECK(fine.epsilon == eps);
    CHECK(fine.min_eigenvalue == doctest::Approx(0.929189).epsilon(1e-4));

    // Tight spacing: the covariance is nearly singular and the test fails.
    NoisyCheckResult coarse =
        noisy_gaussian_check(lattice_covariance(gef, 0.3, 5), eps, 0.3);
    CHECK_FALSE(coarse.pass);
    CHECK(coarse.min_eigenvalue == doctest::Approx(-1.0).epsilon(1e-3));

    // The margin is monotone in the spacing.
    double prev = -2.0;
    for (double spacing : {1.0, 2.0, 3.0, 4.0}) {
        NoisyCheckResult r = noisy_gaussian_check(
            lattice_covariance(gef, spacing, 3), eps, spacing);
        CHECK(r.min_eigenvalue >= prev);
        prev = r.min_eigenvalue;
    }
    CHECK(prev == doctest::Approx(0.998142).epsilon(1e-4));

    HermitianMatrix bad(2);
    bad.at(0, 0) = bad.at(1, 1) = 1.0;
    bad.at(0, 1) = {0.3, 0.1};
    bad.at(1, 0) = {0.3, 0.2};
    CHECK_THROWS_AS(noisy_gaussian_check(bad, eps), std::invalid_argument);
    HermitianMatrix scaledm(2);
    scaledm.at(0, 0) = 2.0;
    scaledm.at(1, 1) = 1.0;
    CHECK_THROWS_AS(noisy_gaussian_check(scaledm, eps),
                    std::invalid_argument);
    CHECK_THROWS_AS(noisy_gaussian_check(id, -0.1), std::invalid_argument);
}

TEST_CASE("product inequality holds with equality for the trivial factor") {
    HermitianMatrix one(1);
    one.at(0, 0) = 1.0;
    ProductInequalityResult t = noisy_product_inequality_mc(
        one, {{[](double) { return 1.0; }, 1.0}}, 200, 7);
    CHECK(t.lhs == 1.0);
    CHECK(t.rhs == 1.0);
    CHECK(t.lhs_std_error == 0.0);
    CHECK(t.pass);
}

TEST_CASE("product inequality for a fully correlated indicator pair") {
    // X1 = Y + Z1, X2 = Y + Z2 with one shared Y: the left side is
    // int phi(w) [Phi(1-w) - Phi(-w)]^2 dw, strictly below the square of
    // the best single-coordinate mean sup_y P(y + Z in [0,1]) = 2 Phi(1/2)-1.
    const double sup_mean = 0.38292492254802620728;
    HermitianMatrix shared(2);
    shared.at(0, 0) = shared.at(0, 1) = 1.0;
    shared.at(1, 0) = shared.at(1, 1) = 1.0;
    auto ind = [](double x) { return x >= 0.0 && x <= 1.0 ? 1.0 : 0.0; };
    ProductInequalityResult r = noisy_product_inequality_mc(
        shared, {{ind, sup_mean}, {ind, sup_mean}}, 200000, 11);

    double lhs_quadrature = integrate_finite(
        [](double w) {
            double p = phi_cdf(1.0 - w) - phi_cdf(-w);
            return phi_pdf(w) * p * p;
        },
        -12.0, 12.0, 0.0, 1e-12);
    CHECK(lhs_quadrature ==
          doctest::Approx(0.08023754707644626).epsilon(1e-10));
    CHECK(r.rhs == doctest::Approx(sup_mean * sup_mean).epsilon(1e-14));
    CHECK(std::abs(r.lhs - lhs_quadrature) <= 4.0 * r.lhs_std_error);
    CHECK(r.pass);

    // Counter-based sampling makes reruns bit-identical.
    ProductInequalityResult again = noisy_product_inequality_mc(
        shared, {{ind, sup_mean}, {ind, sup_mean}}, 200000, 11);
    CHECK(again.lhs == r.lhs);

    CHECK_THROWS_AS(
        noisy_product_inequality_mc(shared, {{ind, sup_mean}}, 100, 1),
        std::invalid_argument);
    HermitianMatrix notpsd(2);
    notpsd.at(0, 0) = notpsd.at(1, 1) = 1.0;
    notpsd.at(0, 1) = notpsd.at(1, 0) = 2.0;
    CHECK_THROWS_AS(noisy_product_inequality_mc(
                        notpsd, {{ind, sup_mean}, {ind, sup_mean}}, 100, 1),
                    std::invalid_argument);
}

TEST_CASE("smeared pair inequality bounds increment exponentials") {
    PsiSpec sn = sine_psi();
    // |sin(x+s) - sin(x-s)| = 2 |cos x| |sin s| <= min(2, 2|s|) for every x,
    // so the envelope below is a valid smeared bound at any shift.
    auto g_bound = [](double s) {
        return std::min(2.0, 2.0 * std::abs(s));
    };
    HermitianMatrix cov(3);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) cov.at(j, k) = j == k ? 1.0 : 0.5;
    ProductInequalityResult r =
        smeared_pair_inequality_mc(sn, g_bound, cov, 0.7, 20000, 13);
    CHECK(r.pass);
    CHECK(r.lhs > 1.0);
    CHECK(r.lhs + 3.0 * r.lhs_std_error < r.rhs);

    CHECK_THROWS_AS(smeared_pair_inequality_mc(log_modulus_complex_psi(),
                                               g_bound, cov, 0.7, 1000, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(smeared_pair_inequality_mc(sn, g_bound, cov, 0.0, 1000, 1),
                    std::invalid_argument);
}

TEST_CASE("two-function family: analytic profile and probability law") {
    struct Ref {
        double eps, a, b, constant, lower;
    };
    const std::vector<Ref> refs{
        {1e-2, 1.07298301314, 1.85846109442, 1.533087080, -0.299891237621},
        {1e-3, 1.31413044244, 2.27614069408, 1.471475203, 0.245758617913},
        {1e-4, 1.51742712939, 2.62826088488, 1.435084525, 0.963648913516},
        {1e-5, 1.69653510610, 2.93848500060, 1.414023399, 1.818472929992}};
    double prev_lower = -1e9;
    for (const Ref& ref : refs) {
        CAPTURE(ref.eps);
        CounterexampleProfile p = counterexample_profile(2, ref.eps);
        CHECK(p.a == doctest::Approx(ref.a).epsilon(1e-9));
        CHECK(p.b == doctest::Approx(ref.b).epsilon(1e-9));
        CHECK(p.floor_constant ==
              doctest::Approx(ref.constant).epsilon(1e-9));
        CHECK(p.lower_bound == doctest::Approx(ref.lower).epsilon(1e-9));
        CHECK(p.b > p.a);
        CHECK(p.lower_bound > prev_lower);
        prev_lower = p.lower_bound;
    }
    // The analytic lower bound crosses zero between eps = 1e-2 and 1e-3 and
    // then grows without bound.
    CHECK(refs.front().lower < 0.0);
    CHECK(refs.back().lower > 1.8);

    // Exact event probability and its eps^4 scaling limit e^{-1}.
    CounterexampleProfile q = counterexample_profile(2, 0.05);
    CHECK(q.probability_exact ==
          doctest::Approx(2.2935067647490654e-6).epsilon(1e-12));
    double ratio = q.probability_exact / std::pow(0.05, 4.0);
    CHECK(ratio == doctest::Approx(0.36696108235985).epsilon(1e-10));
    CounterexampleProfile tiny = counterexample_profile(2, 1e-4);
    CHECK(tiny.probability_exact / std::pow(1e-4, 4.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-7));

    // Monte-Carlo hits agree with the exact probability.
    CounterexampleProfile mc = counterexample_profile(2, 0.1, 2000000,
                                                      20260823);
    CHECK(mc.n_samples == 2000000);
    CHECK(mc.probability_mc * mc.n_samples > 30.0);
    CHECK(std::abs(mc.probability_mc - mc.probability_exact) <=
          3.0 * mc.probability_std_error);

    // Other exponents reshape the interval; the floor is unchanged.
    CounterexampleProfile quartic = counterexample_profile(4, 1e-3);
    CHECK(quartic.a == doctest::Approx(std::pow(std::log(1e3) / 4.0,
                                                0.25)).epsilon(1e-12));
    CHECK(quartic.log_gap_floor ==
          doctest::Approx(counterexample_profile(2, 1e-3).log_gap_floor)
              .epsilon(1e-12));

    CHECK_THROWS_AS(counterexample_profile(0, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(counterexample_profile(2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(counterexample_profile(2, 0.3), std::invalid_argument);
}
