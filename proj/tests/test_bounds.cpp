#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fieldsim/bounds.hpp"
#include "fieldsim/rng.hpp"

using namespace fieldsim;

namespace {

constexpr double kPi = std::numbers::pi;

CorrelationModel fully_correlated_model() {
    return {"fully-correlated", 4, 0.25,
            [](std::size_t, std::size_t) { return 1.0; }};
}

CorrelationModel independent_model() {
    return {"independent", 8, 0.125,
            [](std::size_t i, std::size_t j) { return i == j ? 1.0 : 0.0; }};
}

// Deterministic pseudo-random positive semidefinite covariance: B^T B / m
// with standard normal entries of B drawn from the counter-based generator.
CorrelationModel random_model(int index) {
    const std::size_t m = 6;
    std::vector<double> b(m * m);
    for (std::size_t i = 0; i < b.size(); ++i)
        b[i] = normal_pair(7000 + static_cast<std::uint64_t>(index), 1, i).first;
    return {"random-" + std::to_string(index), m, 1.0 / m,
            [b, m](std::size_t i, std::size_t j) {
                double s = 0.0;
                for (std::size_t t = 0; t < m; ++t)
                    s += b[t * m + i] * b[t * m + j];
                return s / static_cast<double>(m);
            }};
}

double gauss_profile(double r) { return std::exp(-r * r / 2); }
double inverse_profile(double r) { return 1.0 / r; }

}  // namespace

TEST_CASE("closed-form exponential-moment bounds match frozen values") {
    CHECK(exp_moment_bound_tight(0.0) == 1.0);
    CHECK(exp_moment_bound_weak(0.0) == 1.0);
    CHECK(exp_moment_bound_tight(1.0) ==
          doctest::Approx(2.7742859576700095503).epsilon(1e-14));
    CHECK(exp_moment_bound_weak(1.0) ==
          doctest::Approx(3.6615426980398756371).epsilon(1e-14));
    CHECK(exp_moment_bound_tight(0.5) ==
          doctest::Approx(1.567059236692856494).epsilon(1e-13));
    CHECK(exp_moment_bound_tight(0.6) ==
          doctest::Approx(1.7377535373222635251).epsilon(1e-13));
    CHECK(exp_moment_bound_tight(0.8) ==
          doctest::Approx(2.1707516258446018347).epsilon(1e-13));

    // the simple form dominates the sharp one over the whole sweep
    double previous = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double c = 0.05 * i;
        const double tight = exp_moment_bound_tight(c);
        CHECK(tight <= exp_moment_bound_weak(c));
        if (c > 0.0) CHECK(exp_moment_bound_weak(c) - tight > 0.0);
        CHECK(tight > previous);  // strictly increasing
        previous = tight;
    }

    // pair form adds the aggregated scales
    CHECK(exp_moment_bound_pair(0.3, 0.7) == exp_moment_bound_tight(1.0));
    CHECK(exp_moment_bound_pair(0.0, 0.5) == exp_moment_bound_tight(0.5));

    CHECK_THROWS_AS(exp_moment_bound_tight(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(exp_moment_bound_weak(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(exp_moment_bound_pair(-1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(exp_moment_bound_pair(0.0, -1.0), std::invalid_argument);
}

TEST_CASE("the fractional-power bound reproduces the sharp bound at power one") {
    // quadrature route vs closed form: E exp(c|Z|) both ways
    for (double c : {0.3, 1.0, 2.0})
        CHECK(exp_moment_bound_fractional(c, 1.0) ==
              doctest::Approx(exp_moment_bound_tight(c)).epsilon(1e-10));
    CHECK(exp_moment_bound_fractional(0.7, 0.5) ==
          doctest::Approx(1.83220477768977051).epsilon(1e-12));
    CHECK(exp_moment_bound_fractional(0.0, 0.5) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(exp_moment_bound_fractional(0.5, 0.5) <
          exp_moment_bound_fractional(0.7, 0.5));
    CHECK(exp_moment_bound_fractional(0.7, 0.5) <
          exp_moment_bound_fractional(0.9, 0.5));

    CHECK_THROWS_AS(exp_moment_bound_fractional(1.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(exp_moment_bound_fractional(1.0, 2.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(exp_moment_bound_fractional(1.0, -0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(exp_moment_bound_fractional(-1.0, 0.5),
                    std::invalid_argument);
}

TEST_CASE("monte carlo moments attain the bound only for full correlation") {
    const BoundReport full = mc_exp_moment_vs_bound(fully_correlated_model(),
                                                    200000, 101);
    CHECK(full.c == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(full.analytic == exp_moment_bound_tight(1.0));
    CHECK(full.has_mc);
    CHECK(full.pass);
    CHECK_FALSE(full.heavy_tail);
    CHECK(full.n_samples == 200000);
    CHECK(full.mc_std_error > 0.0);
    // equality case: the sampled field is c |Z|, so the estimate sits on the
    // bound up to Monte Carlo noise
    CHECK(std::abs(full.mc_estimate - full.analytic) / full.analytic < 0.01);

    // independent cells: the sum of |G_i|/8 concentrates, so the moment has
    // the exact product form tight(1/8)^8 and sits far below tight(1)
    const BoundReport indep = mc_exp_moment_vs_bound(independent_model(),
                                                     100000, 102);
    CHECK(indep.c == doctest::Approx(1.0).epsilon(1e-12));
    const double product_form = std::pow(exp_moment_bound_tight(0.125), 8);
    CHECK(std::abs(indep.mc_estimate - product_form) <
          4 * indep.mc_std_error);
    CHECK(indep.pass);
    CHECK(indep.mc_estimate < indep.analytic - 100 * indep.mc_std_error);

    // byte-identical rerun
    const BoundReport again = mc_exp_moment_vs_bound(fully_correlated_model(),
                                                     200000, 101);
    CHECK(again.mc_estimate == full.mc_estimate);
    CHECK(again.mc_std_error == full.mc_std_error);
}

TEST_CASE("scaling the field by half halves the aggregated scale") {
    const CorrelationModel half = scale_model(fully_correlated_model(), 0.5);
    const BoundReport report = mc_exp_moment_vs_bound(half, 100000, 101);
    CHECK(report.c == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(report.analytic ==
          doctest::Approx(exp_moment_bound_tight(0.5)).epsilon(1e-15));
    CHECK(report.pass);

    const CorrelationModel same = scale_model(fully_correlated_model(), 1.0);
    const BoundReport unscaled = mc_exp_moment_vs_bound(same, 100000, 7);
    CHECK(unscaled.c == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random covariance models respect the bound at three stderrs") {
    for (int k = 0; k < 10; ++k) {
        const BoundReport report =
            mc_exp_moment_vs_bound(random_model(k), 3000, 200 + k);
        CAPTURE(k);
        CHECK(report.pass);
        CHECK(report.c > 0.5);
        CHECK(report.c < 1.5);
        CHECK_FALSE(report.heavy_tail);
    }
}

TEST_CASE("invalid covariance models are rejected") {
    CorrelationModel asym{"asym", 2, 0.5, [](std::size_t i, std::size_t j) {
                              return i == j ? 1.0 : (i < j ? 0.5 : 0.2);
                          }};
    CHECK_THROWS_AS(mc_exp_moment_vs_bound(asym, 1000, 1),
                    std::invalid_argument);
    CorrelationModel indefinite{"indefinite", 2, 0.5,
                                [](std::size_t i, std::size_t j) {
                                    return i == j ? 1.0 : 2.0;
                                }};
    CHECK_THROWS_AS(mc_exp_moment_vs_bound(indefinite, 1000, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        mc_exp_moment_vs_bound({"empty", 0, 1.0, nullptr}, 1000, 1),
        std::invalid_argument);
    CorrelationModel flat{"flat", 2, 0.0,
                          [](std::size_t, std::size_t) { return 1.0; }};
    CHECK_THROWS_AS(mc_exp_moment_vs_bound(flat, 1000, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(mc_exp_moment_vs_bound(fully_correlated_model(), 50, 1),
                    std::invalid_argument);
}

TEST_CASE("shifting a decreasing profile never raises the product integral") {
    // 1D Gaussians have the closed form sqrt(pi) e^{-a^2/4}
    const RearrangementResult d1 =
        rearrangement_check(gauss_profile, gauss_profile, 1.0, 1);
    CHECK(d1.shifted ==
          doctest::Approx(std::sqrt(kPi) * std::exp(-0.25)).epsilon(1e-10));
    CHECK(d1.centered == doctest::Approx(std::sqrt(kPi)).epsilon(1e-10));
    CHECK(d1.pass);

    // 2D Gaussians: pi e^{-a^2/4} against pi
    const RearrangementResult d2 =
        rearrangement_check(gauss_profile, gauss_profile, 1.0, 2);
    CHECK(d2.shifted ==
          doctest::Approx(kPi * std::exp(-0.25)).epsilon(1e-8));
    CHECK(d2.centered == doctest::Approx(kPi).epsilon(1e-10));
    CHECK(d2.pass);
    for (double a : {0.25, 0.5, 2.0, 4.0}) {
        const RearrangementResult r =
            rearrangement_check(gauss_profile, gauss_profile, a, 2);
        CAPTURE(a);
        CHECK(r.pass);
        CHECK(r.shifted ==
              doctest::Approx(kPi * std::exp(-a * a / 4)).epsilon(1e-7));
    }

    // integrable origin singularity in 2D: f(r) = 1/r against a Gaussian
    const RearrangementResult inv =
        rearrangement_check(inverse_profile, gauss_profile, 1.0, 2);
    CHECK(inv.shifted == doctest::Approx(6.22910588204).epsilon(1e-6));
    CHECK(inv.centered ==
          doctest::Approx(std::sqrt(2 * kPi * kPi * kPi)).epsilon(1e-8));
    CHECK(inv.pass);

    // zero shift collapses to the identical integral
    const RearrangementResult z1 =
        rearrangement_check(gauss_profile, gauss_profile, 0.0, 1);
    CHECK(z1.shifted == z1.centered);
    const RearrangementResult z2 =
        rearrangement_check(inverse_profile, gauss_profile, 0.0, 2);
    CHECK(z2.shifted == z2.centered);
    CHECK(z1.pass);
    CHECK(z2.pass);

    CHECK_THROWS_AS(rearrangement_check(gauss_profile, gauss_profile, 1.0, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(rearrangement_check(gauss_profile, gauss_profile, -1.0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(rearrangement_check(nullptr, gauss_profile, 1.0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        rearrangement_check(gauss_profile, gauss_profile, 5.0, 1, {4.0, 1e-10}),
        std::invalid_argument);
    // 1/|x| against a Gaussian is not integrable on the line: the quadrature
    // failure must surface, not a silent number
    CHECK_THROWS_AS(rearrangement_check(inverse_profile, gauss_profile, 1.0, 1),
                    std::runtime_error);
}

TEST_CASE("decay-tail masses match independent high-precision references") {
    // closed-form spot values
    CHECK(decay_tail_mass(0.0, 7.0) == doctest::Approx(1.0 / 30).epsilon(1e-15));
    CHECK(decay_tail_mass(1.0, 7.0) ==
          doctest::Approx(7.0 / 1920).epsilon(1e-15));
    // corner and edge masses, including far-out arguments where a naive
    // radial quadrature on an infinite interval loses digits
    CHECK(quadrant_tail_mass(0.0, 0.0, 7.0) ==
          doctest::Approx(kPi / 60).epsilon(1e-12));
    CHECK(halfplane_tail_mass(0.0, 7.0) ==
          doctest::Approx(kPi / 30).epsilon(1e-12));
    CHECK(quadrant_tail_mass(1.0, 2.0, 7.0) ==
          doctest::Approx(1.791545360945e-4).epsilon(1e-9));
    CHECK(halfplane_tail_mass(8.0, 7.0) ==
          doctest::Approx(3.46141825071429e-6).epsilon(1e-9));
    CHECK(halfplane_tail_mass(50.0, 7.0) ==
          doctest::Approx(6.13822429467701e-10).epsilon(1e-9));
    CHECK(halfplane_tail_mass(200.0, 7.0) ==
          doctest::Approx(6.49052451756156e-13).epsilon(1e-8));
    CHECK(halfplane_tail_mass(1000.0, 7.0) ==
          doctest::Approx(2.12191609153689e-16).epsilon(1e-8));

    // symmetry, monotonicity, and the halfplane = two mirrored quadrants
    // identity
    CHECK(quadrant_tail_mass(0.3, 0.7, 7.0) ==
          doctest::Approx(quadrant_tail_mass(0.7, 0.3, 7.0)).epsilon(1e-12));
    CHECK(quadrant_tail_mass(1.0, 1.0, 7.0) <
          quadrant_tail_mass(0.5, 1.0, 7.0));
    CHECK(quadrant_tail_mass(0.5, 1.0, 7.0) <
          quadrant_tail_mass(0.5, 0.5, 7.0));
    CHECK(halfplane_tail_mass(1.0, 7.0) ==
          doctest::Approx(2 * quadrant_tail_mass(1.0, 0.0, 7.0))
              .epsilon(1e-12));

    CHECK_THROWS_AS(decay_tail_mass(1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(decay_tail_mass(-1.0, 7.0), std::invalid_argument);
    CHECK_THROWS_AS(quadrant_tail_mass(-0.1, 0.0, 7.0), std::invalid_argument);
    CHECK_THROWS_AS(halfplane_tail_mass(-0.1, 7.0), std::invalid_argument);
    CHECK_THROWS_AS(quadrant_tail_mass(0.0, 0.0, 1.5), std::invalid_argument);
}

TEST_CASE("cone totals are stable under refinement and match the oracle") {
    const ConeResult quadrant =
        cone_integral(7.0, 1.0, ConePair::OpposingQuadrants);
    CHECK(quadrant.convergent_claim);
    CHECK(quadrant.converged);
    CHECK(quadrant.total == doctest::Approx(0.5546402130).epsilon(1e-6));
    CHECK(quadrant.refinement_error < 0.01);
    CHECK(quadrant.refinement_error < 1e-4);
    CHECK(quadrant.shell_ratio_limit ==
          doctest::Approx(std::exp2(-0.5)).epsilon(1e-15));
    CHECK(quadrant.shells.back().ratio ==
          doctest::Approx(std::exp2(-0.5)).epsilon(0.01));
    CHECK(quadrant.head > 0.0);
    CHECK(quadrant.tail_estimate > 0.0);
    CHECK(quadrant.tail_estimate < 1e-3 * quadrant.total);
    CHECK(quadrant.shells.front().index == 0);

    const ConeResult halfcone =
        cone_integral(7.0, 1.0, ConePair::ConeVersusHalfplane);
    CHECK(halfcone.converged);
    CHECK(halfcone.total == doctest::Approx(1.1784366463).epsilon(1e-6));
    CHECK(halfcone.refinement_error < 0.01);

    const ConeResult narrow =
        cone_integral(12.0, 0.5, ConePair::OpposingQuadrants);
    CHECK(narrow.converged);
    CHECK(narrow.total == doctest::Approx(0.8000859394).epsilon(1e-6));
    CHECK(narrow.refinement_error < 0.01);

    // slower geometric decay: needs more shells and a larger tail estimate,
    // still matching the independent quadrature oracle
    const ConeResult slow =
        cone_integral(11.0, 0.5, ConePair::OpposingQuadrants);
    CHECK(slow.converged);
    CHECK(slow.total == doctest::Approx(2.0202177589).epsilon(2e-4));

    // pure quadrature: bit-identical rerun
    const ConeResult again =
        cone_integral(7.0, 1.0, ConePair::OpposingQuadrants);
    CHECK(again.total == quadrant.total);
}

TEST_CASE("divergent cone parameters report growing shells without failing") {
    // ratio -> 2^{(6-alpha)/2} = sqrt(2) for alpha = 5, delta = 1
    const ConeResult grow = cone_integral(
        5.0, 1.0, ConePair::OpposingQuadrants, ConeMode::Integral, {0.0, 0.0},
        9, 1);
    CHECK_FALSE(grow.convergent_claim);
    CHECK_FALSE(grow.converged);
    CHECK(grow.tail_estimate == 0.0);
    const double root2 = std::numbers::sqrt2;
    double last = std::numeric_limits<double>::infinity();
    for (const ShellTerm& shell : grow.shells) {
        if (shell.index < 4) continue;
        CAPTURE(shell.index);
        CHECK(std::abs(shell.ratio / root2 - 1.0) < 0.10);
        CHECK(shell.ratio < last);  // approaches the limit from above
        last = shell.ratio;
    }
    CHECK(grow.shell_ratio_limit == doctest::Approx(root2).epsilon(1e-15));

    // delta = 1/2 threshold sits at alpha = 10: growth below, decay above
    const ConeResult below = cone_integral(
        9.0, 0.5, ConePair::OpposingQuadrants, ConeMode::Integral, {0.0, 0.0},
        8, 1);
    CHECK_FALSE(below.convergent_claim);
    CHECK(below.shells.back().ratio > 1.0);
    CHECK(std::abs(below.shells.back().ratio / std::exp2(0.25) - 1.0) < 0.10);
    const ConeResult above =
        cone_integral(11.0, 0.5, ConePair::OpposingQuadrants);
    CHECK(above.convergent_claim);
    CHECK(above.shells.back().ratio < 1.0);

    // claimed-convergent but too slow for the budget: an explicit error
    CHECK_THROWS_AS(
        cone_integral(6.1, 1.0, ConePair::OpposingQuadrants,
                      ConeMode::Integral, {0.0, 0.0}, 12, 1),
        SlowConvergenceError);
}

TEST_CASE("lattice sums stay bounded uniformly over random offsets") {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int k = 0; k < 20; ++k) {
        const std::array<double, 2> offset{
            uniform01(55, 0, static_cast<std::uint64_t>(k)),
            uniform01(55, 1, static_cast<std::uint64_t>(k))};
        const ConeResult sum = cone_integral(
            7.0, 1.0, ConePair::OpposingQuadrants, ConeMode::LatticeSum,
            offset, 6, 1);
        CAPTURE(k);
        CHECK(sum.total > 0.0);
        CHECK(std::isfinite(sum.total));
        lo = std::min(lo, sum.total);
        hi = std::max(hi, sum.total);
    }
    // offsets near the cone corner add one large term, so the spread stays
    // within a modest factor while every total sits below a fixed multiple
    // of the continuum integral
    CHECK(hi / lo < 2.5);
    const ConeResult integral =
        cone_integral(7.0, 1.0, ConePair::OpposingQuadrants);
    CHECK(lo > 0.4 * integral.total);
    CHECK(hi < 1.5 * integral.total);

    // origin-anchored lattices of both pairs stay finite
    const ConeResult origin = cone_integral(
        7.0, 1.0, ConePair::OpposingQuadrants, ConeMode::LatticeSum,
        {0.0, 0.0}, 6, 1);
    CHECK(std::isfinite(origin.total));
    const ConeResult halfcone = cone_integral(
        7.0, 1.0, ConePair::ConeVersusHalfplane, ConeMode::LatticeSum,
        {0.0, 0.0}, 6, 1);
    CHECK(halfcone.total > 0.0);
    CHECK(std::isfinite(halfcone.total));
}

TEST_CASE("cone preconditions are enforced") {
    CHECK_THROWS_AS(cone_integral(2.0, 1.0, ConePair::OpposingQuadrants),
                    std::invalid_argument);
    CHECK_THROWS_AS(cone_integral(7.0, 0.0, ConePair::OpposingQuadrants),
                    std::invalid_argument);
    CHECK_THROWS_AS(cone_integral(7.0, 2.0, ConePair::OpposingQuadrants),
                    std::invalid_argument);
    CHECK_THROWS_AS(cone_integral(7.0, 1.0, ConePair::OpposingQuadrants,
                                  ConeMode::Integral, {0.0, 0.0}, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(cone_integral(7.0, 1.0, ConePair::OpposingQuadrants,
                                  ConeMode::Integral, {0.0, 0.0}, 10, 0),
                    std::invalid_argument);
}
