#pragma once

// Desk-scale Monte Carlo experiments on the zero set of the planar Gaussian
// analytic function: zero intensity, the variance constant of smooth linear
// statistics, asymptotic normality, Gaussian-tail surrogates for moderate
// deviations, and the small-tilt cumulant (linear response) limit.

#include <cstdint>
#include <string>
#include <vector>

#include "fieldsim/estimator.hpp"
#include "fieldsim/gef.hpp"

namespace fieldsim {

// Closed-form constants shared by the experiments.
struct Constants {
    double euler_gamma = 0.0;
    double zeta_three = 0.0;
    double sigma = 0.0;     // zero-statistic scale (1/4) sqrt(zeta(3)/pi)
    double sigma_x = 0.0;   // field scale (1/2) sqrt(pi zeta(3)) = 2 pi sigma
    double sigma_sq = 0.0;
    double sigma_x_sq = 0.0;
};
Constants constants();

struct EstimatorResult {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    long n_samples = 0;
    std::uint64_t seed = 0;
    bool has_target = false;
    double target = 0.0;
    std::string target_source;  // formula behind the target
    double tolerance = 0.0;     // relative, applied when a target is present
    bool pass = false;          // |estimate - target| <= tolerance * |target|
    long failures = 0;          // samples skipped on zero-finding failures
};

// Per-sample deviations n_h - (r^2/pi) int h of the smooth linear statistic
// of the zero set at scale r: the shared core of the variance, normality,
// tail, and zeros-form response experiments.
struct DeviationSamples {
    double r = 0.0;
    long attempted = 0;
    long failures = 0;
    std::vector<double> deviations;
};
DeviationSamples sample_deviations(double r, const TestFunction& h,
                                   long samples, std::uint64_t seed);

// Mean number of zeros in the disk |z| <= R against the R^2 intensity law.
// Requires 0 < R <= 8 and samples >= 2; samples whose zero extraction fails
// (winding mismatch or non-convergence) are skipped and counted.
EstimatorResult mean_count_experiment(double R, long samples,
                                      std::uint64_t seed);

// r^2 Var(deviation) / ||Laplacian h||^2 against sigma^2 = zeta(3)/(16 pi),
// within 15%.  The overload reuses presampled deviations.
EstimatorResult variance_experiment(double r, const TestFunction& h,
                                    long samples, std::uint64_t seed);
EstimatorResult variance_experiment(const DeviationSamples& samples,
                                    const TestFunction& h, std::uint64_t seed);

// Shape of the standardized deviation (scale sigma ||Laplacian h|| / r):
// sample skewness, excess kurtosis, and the Kolmogorov-Smirnov distance to
// the standard normal, each with its acceptance gate.
struct NormalityResult {
    long n_samples = 0;
    std::uint64_t seed = 0;
    double skewness = 0.0;
    double kurtosis_excess = 0.0;
    double ks_distance = 0.0;
    double skewness_gate = 0.0;  // 4 sqrt(6/n)
    double kurtosis_gate = 0.0;  // 4 sqrt(24/n)
    double ks_gate = 0.0;        // 1.6 / sqrt(n)
    bool pass = false;           // all three inside their gates
};
NormalityResult clt_experiment(double r, const TestFunction& h, long samples,
                               std::uint64_t seed);
NormalityResult clt_experiment(const DeviationSamples& samples,
                               const TestFunction& h, std::uint64_t seed);

// Upper-tail comparison of the standardized deviation with the Gaussian
// reference at each threshold c.
struct TailPoint {
    double c = 0.0;
    double p_hat = 0.0;
    double p_std_error = 0.0;   // binomial
    double gaussian_tail = 0.0;  // 1 - Phi(c)
    double log_ratio = 0.0;      // (1/c^2) log p_hat; NaN at c = 0 or p = 0
    long exceedances = 0;
    bool few_exceedances = false;  // < 30: estimate unreliable
};
// Requires samples >= 1e5 so thresholds up to c = 2.5 stay resolvable.
std::vector<TailPoint> md_experiment(double r, const TestFunction& h,
                                     const std::vector<double>& c_list,
                                     long samples, std::uint64_t seed);
std::vector<TailPoint> md_experiment(const DeviationSamples& samples,
                                     const TestFunction& h,
                                     const std::vector<double>& c_list);

// Tilted-moment (cumulant) estimates (1 / (r^2 lambda^2)) log E exp(lambda S)
// for the field integral S = int h(z/r) X_z dz or the scaled zero-count
// deviation S = r^2 (n_h - E n_h); the small-lambda limit is Var(S)/(2 r^2).
enum class ResponseForm { Field, Zeros };

struct ResponsePoint {
    double lambda = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;    // block jackknife, 50 blocks
    bool max_dominated = false;  // largest sample carries > half the mean
};

struct ResponseResult {
    ResponseForm form = ResponseForm::Field;
    double r = 0.0;
    long n_samples = 0;
    std::uint64_t seed = 0;
    long failures = 0;
    std::vector<ResponsePoint> points;
    double variance_limit = 0.0;  // Var(S) / (2 r^2)
    double variance_limit_std_error = 0.0;
    double target = 0.0;  // (1/2)||h||^2 sigma_x^2 or (1/2)||Lap h||^2 sigma^2
};

// Requires nonzero lambdas with max |lambda S| < 5 over the sampled S
// (throws std::invalid_argument otherwise) and samples >= 100.  The zeros
// overload reuses presampled deviations.
ResponseResult linear_response_experiment(double r, const TestFunction& h,
                                          const std::vector<double>& lambdas,
                                          long samples, std::uint64_t seed,
                                          ResponseForm form);
ResponseResult linear_response_experiment(const DeviationSamples& samples,
                                          const TestFunction& h,
                                          const std::vector<double>& lambdas,
                                          std::uint64_t seed);

}  // namespace fieldsim
