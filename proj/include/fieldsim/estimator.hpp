#pragma once

// Monte Carlo summaries: moments with standard errors, batch means,
// block jackknife for smooth functionals of a mean, and distribution
// comparison statistics.

#include <functional>
#include <span>
#include <vector>

namespace fieldsim {

struct MomentSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;       // unbiased
    double std_error = 0.0;      // of the mean
    double skewness = 0.0;
    double kurtosis_excess = 0.0;
};

MomentSummary summarize(std::span<const double> values);

// Standard error of the mean from contiguous batch means (robust to mild
// dependence across consecutive samples).
double batch_means_std_error(std::span<const double> values, int n_batches);

// Jackknife over contiguous blocks for T = transform(mean(values)):
// bias-corrected estimate and standard error.
struct JackknifeResult {
    double estimate = 0.0;
    double std_error = 0.0;
    int n_blocks = 0;
};
JackknifeResult jackknife_of_mean(std::span<const double> values, int n_blocks,
                                  const std::function<double(double)>& transform);

// Kolmogorov-Smirnov statistic sup_x |F_n(x) - cdf(x)|.
double ks_statistic(std::vector<double> values,
                    const std::function<double(double)>& cdf);

// Standard normal CDF.
double normal_cdf(double x);

// sqrt(p(1-p)/n) for an empirical proportion.
double binomial_std_error(double p_hat, std::size_t n);

}  // namespace fieldsim
