#include "fieldsim/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fieldsim {

MomentSummary summarize(std::span<const double> values) {
    MomentSummary s;
    s.n = values.size();
    if (s.n == 0) return s;
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(s.n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (const double v : values) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const auto n = static_cast<double>(s.n);
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.mean = mean;
    s.variance = s.n > 1 ? m2 * n / (n - 1.0) : 0.0;
    s.std_error = s.n > 1 ? std::sqrt(s.variance / n) : 0.0;
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis_excess = m4 / (m2 * m2) - 3.0;
    }
    return s;
}

double batch_means_std_error(std::span<const double> values, int n_batches) {
    const std::size_t n = values.size();
    if (n < 2) throw std::invalid_argument("need at least 2 values");
    const int nb = std::max(2, std::min<int>(n_batches, static_cast<int>(n)));
    std::vector<double> bm(static_cast<std::size_t>(nb), 0.0);
    std::vector<std::size_t> cnt(static_cast<std::size_t>(nb), 0);
    for (std::size_t k = 0; k < n; ++k) {
        const auto b = static_cast<std::size_t>(
            (static_cast<unsigned long long>(k) * nb) / n);
        bm[b] += values[k];
        cnt[b] += 1;
    }
    double mean = 0.0;
    for (int b = 0; b < nb; ++b) {
        bm[static_cast<std::size_t>(b)] /= static_cast<double>(cnt[static_cast<std::size_t>(b)]);
        mean += bm[static_cast<std::size_t>(b)];
    }
    mean /= nb;
    double var = 0.0;
    for (int b = 0; b < nb; ++b) {
        const double d = bm[static_cast<std::size_t>(b)] - mean;
        var += d * d;
    }
    var /= (nb - 1);
    return std::sqrt(var / nb);
}

JackknifeResult jackknife_of_mean(std::span<const double> values, int n_blocks,
                                  const std::function<double(double)>& transform) {
    const std::size_t n = values.size();
    if (n < 2) throw std::invalid_argument("need at least 2 values");
    const int nb = std::max(2, std::min<int>(n_blocks, static_cast<int>(n)));
    std::vector<double> block_sum(static_cast<std::size_t>(nb), 0.0);
    std::vector<std::size_t> block_cnt(static_cast<std::size_t>(nb), 0);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto b = static_cast<std::size_t>(
            (static_cast<unsigned long long>(k) * nb) / n);
        block_sum[b] += values[k];
        block_cnt[b] += 1;
        total += values[k];
    }
    const double t_full = transform(total / static_cast<double>(n));
    std::vector<double> t_drop(static_cast<std::size_t>(nb), 0.0);
    double t_bar = 0.0;
    for (int b = 0; b < nb; ++b) {
        const auto bu = static_cast<std::size_t>(b);
        const double mean_wo =
            (total - block_sum[bu]) / static_cast<double>(n - block_cnt[bu]);
        t_drop[bu] = transform(mean_wo);
        t_bar += t_drop[bu];
    }
    t_bar /= nb;
    double ss = 0.0;
    for (int b = 0; b < nb; ++b) {
        const double d = t_drop[static_cast<std::size_t>(b)] - t_bar;
        ss += d * d;
    }
    JackknifeResult r;
    r.n_blocks = nb;
    r.estimate = nb * t_full - (nb - 1) * t_bar;
    r.std_error = std::sqrt(ss * (nb - 1) / nb);
    return r;
}

double ks_statistic(std::vector<double> values,
                    const std::function<double(double)>& cdf) {
    if (values.empty()) throw std::invalid_argument("need at least 1 value");
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        worst = std::max({worst, std::abs(f - lo), std::abs(f - hi)});
    }
    return worst;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double binomial_std_error(double p_hat, std::size_t n) {
    if (n == 0) throw std::invalid_argument("need n > 0");
    return std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / static_cast<double>(n));
}

}  // namespace fieldsim
