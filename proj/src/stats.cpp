#include "fieldsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "fieldsim/constants.hpp"
#include "fieldsim/lattice.hpp"
#include "fieldsim/parallel.hpp"

namespace fieldsim {

namespace {

constexpr double kDeskRadiusLimit = 8.0;
constexpr double kTruncationTol = 1e-12;
constexpr int kJackknifeBlocks = 50;
constexpr long kFewExceedances = 30;
constexpr double kMaxTilt = 5.0;  // overflow guard on lambda * |S|

// Standard error of a sample variance from the fourth central moment:
// Var(s^2) ~ (mu4 - sigma^4) / n.
double variance_std_error(const MomentSummary& m) {
    const double mu4 =
        (m.kurtosis_excess + 3.0) * m.variance * m.variance;
    const double spread = mu4 - m.variance * m.variance;
    if (spread <= 0.0 || m.n < 2) return 0.0;
    return std::sqrt(spread / static_cast<double>(m.n));
}

double laplacian_norm(const TestFunction& h) {
    if (!(h.laplacian_norm_sq > 0.0)) {
        throw std::invalid_argument(
            "test function must carry a positive Laplacian norm");
    }
    return std::sqrt(h.laplacian_norm_sq);
}

void require_samples(long samples, long minimum, const char* what) {
    if (samples < minimum) {
        throw std::invalid_argument(std::string(what) + " needs at least " +
                                    std::to_string(minimum) + " samples");
    }
}

// Standardizes zero-count deviations by the asymptotic scale
// sigma ||Laplacian h|| / r.
std::vector<double> standardized_deviations(const DeviationSamples& samples,
                                            const TestFunction& h) {
    const double scale =
        sigma_zero() * laplacian_norm(h) / samples.r;
    std::vector<double> out(samples.deviations.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = samples.deviations[i] / scale;
    }
    return out;
}

struct TiltedSamples {
    std::vector<double> values;  // S per kept sample
    long failures = 0;
};

// S = int h(z/r) X_z dz by the midpoint rule on a lattice covering the
// support disk, excluding (and counting) singular nodes.
TiltedSamples sample_field_integrals(double r, const TestFunction& h,
                                     long samples, std::uint64_t seed) {
    const double radius = r * h.support_radius;
    const Lattice lattice = make_lattice(radius / 50.0, radius);
    const int order = truncation_order(radius, kTruncationTol);
    const double vol = lattice.cell_volume();
    const std::size_t n = static_cast<std::size_t>(samples);

    std::vector<double> values(n, 0.0);
    std::vector<long> skipped(n, 0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            const GefCoefficients coeffs = sample_gef(order, seed, s);
            const XField field = field_X(coeffs, lattice);
            double sum = 0.0;
            for (std::size_t k = 0; k < field.grid.points.size(); ++k) {
                const auto& p = field.grid.points[k];
                const double rho = std::hypot(p[0], p[1]) / r;
                if (rho >= h.support_radius) continue;
                if (field.singular[k]) {
                    ++skipped[s];
                    continue;
                }
                sum += h.profile(rho) * field.grid.re[k];
            }
            values[s] = sum * vol;
        }
    });

    TiltedSamples out;
    out.values = std::move(values);
    for (long c : skipped) out.failures += c;
    return out;
}

ResponseResult response_from_values(const TiltedSamples& tilted, double r,
                                    const std::vector<double>& lambdas,
                                    std::uint64_t seed, ResponseForm form,
                                    double target) {
    if (lambdas.empty()) {
        throw std::invalid_argument("response experiment needs tilt values");
    }
    for (double lambda : lambdas) {
        if (lambda == 0.0 || !std::isfinite(lambda)) {
            throw std::invalid_argument("tilt values must be nonzero finite");
        }
    }
    const std::vector<double>& s_values = tilted.values;
    require_samples(static_cast<long>(s_values.size()), 100,
                    "response experiment");

    double max_abs = 0.0;
    for (double s : s_values) max_abs = std::max(max_abs, std::abs(s));
    for (double lambda : lambdas) {
        if (std::abs(lambda) * max_abs >= kMaxTilt) {
            throw std::invalid_argument(
                "tilt too large: |lambda| * max|S| must stay below 5");
        }
    }

    ResponseResult result;
    result.form = form;
    result.r = r;
    result.n_samples = static_cast<long>(s_values.size());
    result.seed = seed;
    result.failures = tilted.failures;
    result.target = target;

    const MomentSummary moments = summarize(s_values);
    result.variance_limit = moments.variance / (2.0 * r * r);
    result.variance_limit_std_error =
        variance_std_error(moments) / (2.0 * r * r);

    std::vector<double> weights(s_values.size());
    for (double lambda : lambdas) {
        double total = 0.0;
        double largest = 0.0;
        for (std::size_t i = 0; i < s_values.size(); ++i) {
            weights[i] = std::exp(lambda * s_values[i]);
            total += weights[i];
            largest = std::max(largest, weights[i]);
        }
        const double denom = r * r * lambda * lambda;
        const JackknifeResult jk = jackknife_of_mean(
            weights, kJackknifeBlocks,
            [denom](double m) { return std::log(m) / denom; });
        ResponsePoint point;
        point.lambda = lambda;
        point.estimate = jk.estimate;
        point.std_error = jk.std_error;
        point.max_dominated = largest > 0.5 * total;
        result.points.push_back(point);
    }
    return result;
}

}  // namespace

Constants constants() {
    Constants c;
    c.euler_gamma = fieldsim::euler_gamma();
    c.zeta_three = zeta3();
    c.sigma = sigma_zero();
    c.sigma_x = fieldsim::sigma_x();
    c.sigma_sq = sigma_zero_sq();
    c.sigma_x_sq = fieldsim::sigma_x_sq();
    return c;
}

DeviationSamples sample_deviations(double r, const TestFunction& h,
                                   long samples, std::uint64_t seed) {
    if (!(r > 0.0)) throw std::invalid_argument("scale r must be positive");
    const double radius = r * h.support_radius;
    if (radius > kDeskRadiusLimit) {
        throw std::invalid_argument(
            "r * support_radius exceeds the desk-scale limit 8");
    }
    require_samples(samples, 2, "deviation sampling");

    const int order = truncation_order(radius + 2.0, kTruncationTol);
    const std::size_t n = static_cast<std::size_t>(samples);
    std::vector<double> values(n, 0.0);
    std::vector<std::uint8_t> kept(n, 0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            const GefCoefficients coeffs = sample_gef(order, seed, s);
            try {
                const ZeroSet zeros = find_zeros(coeffs, radius);
                values[s] = linear_statistic(zeros, h, r).deviation;
                kept[s] = 1;
            } catch (const ZeroFindingError&) {
                kept[s] = 0;
            }
        }
    });

    DeviationSamples out;
    out.r = r;
    out.attempted = samples;
    out.deviations.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        if (kept[s]) {
            out.deviations.push_back(values[s]);
        } else {
            ++out.failures;
        }
    }
    return out;
}

EstimatorResult mean_count_experiment(double R, long samples,
                                      std::uint64_t seed) {
    if (!(R > 0.0) || R > kDeskRadiusLimit) {
        throw std::invalid_argument("disk radius must lie in (0, 8]");
    }
    require_samples(samples, 2, "mean-count experiment");

    const int order = truncation_order(R + 2.0, kTruncationTol);
    const std::size_t n = static_cast<std::size_t>(samples);
    std::vector<double> counts(n, 0.0);
    std::vector<std::uint8_t> kept(n, 0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            const GefCoefficients coeffs = sample_gef(order, seed, s);
            try {
                const ZeroSet zeros = find_zeros(coeffs, R);
                counts[s] = static_cast<double>(zeros.zeros.size());
                kept[s] = 1;
            } catch (const ZeroFindingError&) {
                kept[s] = 0;
            }
        }
    });

    std::vector<double> used;
    used.reserve(n);
    long failures = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (kept[s]) {
            used.push_back(counts[s]);
        } else {
            ++failures;
        }
    }
    if (used.size() < 2) {
        throw std::runtime_error("too many winding mismatches to estimate");
    }

    const MomentSummary m = summarize(used);
    EstimatorResult result;
    result.name = "mean-count";
    result.estimate = m.mean;
    result.std_error = m.std_error;
    result.n_samples = static_cast<long>(used.size());
    result.seed = seed;
    result.has_target = true;
    result.target = R * R;
    result.target_source = "zero intensity: E n(R) = R^2";
    result.tolerance = 0.02;
    result.pass =
        std::abs(result.estimate - result.target) <=
        result.tolerance * result.target;
    result.failures = failures;
    return result;
}

EstimatorResult variance_experiment(const DeviationSamples& samples,
                                    const TestFunction& h,
                                    std::uint64_t seed) {
    require_samples(static_cast<long>(samples.deviations.size()), 100,
                    "variance experiment");
    const double factor =
        samples.r * samples.r / h.laplacian_norm_sq;
    const MomentSummary m = summarize(samples.deviations);

    EstimatorResult result;
    result.name = "variance";
    result.estimate = factor * m.variance;
    result.std_error = factor * variance_std_error(m);
    result.n_samples = static_cast<long>(samples.deviations.size());
    result.seed = seed;
    result.has_target = true;
    result.target = sigma_zero_sq();
    result.target_source = "sigma^2 = zeta(3) / (16 pi)";
    result.tolerance = 0.15;
    result.pass =
        std::abs(result.estimate - result.target) <=
        result.tolerance * result.target;
    result.failures = samples.failures;
    return result;
}

EstimatorResult variance_experiment(double r, const TestFunction& h,
                                    long samples, std::uint64_t seed) {
    require_samples(samples, 100, "variance experiment");
    return variance_experiment(sample_deviations(r, h, samples, seed), h,
                               seed);
}

NormalityResult clt_experiment(const DeviationSamples& samples,
                               const TestFunction& h, std::uint64_t seed) {
    require_samples(static_cast<long>(samples.deviations.size()), 100,
                    "normality experiment");
    std::vector<double> standardized = standardized_deviations(samples, h);
    const MomentSummary m = summarize(standardized);
    const double n = static_cast<double>(m.n);

    NormalityResult result;
    result.n_samples = static_cast<long>(m.n);
    result.seed = seed;
    result.skewness = m.skewness;
    result.kurtosis_excess = m.kurtosis_excess;
    result.ks_distance = ks_statistic(std::move(standardized), normal_cdf);
    result.skewness_gate = 4.0 * std::sqrt(6.0 / n);
    result.kurtosis_gate = 4.0 * std::sqrt(24.0 / n);
    result.ks_gate = 1.6 / std::sqrt(n);
    result.pass = std::abs(result.skewness) <= result.skewness_gate &&
                  std::abs(result.kurtosis_excess) <= result.kurtosis_gate &&
                  result.ks_distance < result.ks_gate;
    return result;
}

NormalityResult clt_experiment(double r, const TestFunction& h, long samples,
                               std::uint64_t seed) {
    require_samples(samples, 100, "normality experiment");
    return clt_experiment(sample_deviations(r, h, samples, seed), h, seed);
}

std::vector<TailPoint> md_experiment(const DeviationSamples& samples,
                                     const TestFunction& h,
                                     const std::vector<double>& c_list) {
    if (c_list.empty()) {
        throw std::invalid_argument("tail experiment needs thresholds");
    }
    for (double c : c_list) {
        if (c < 0.0 || !std::isfinite(c)) {
            throw std::invalid_argument("thresholds must be finite and >= 0");
        }
    }
    require_samples(static_cast<long>(samples.deviations.size()), 100,
                    "tail experiment");

    const std::vector<double> standardized =
        standardized_deviations(samples, h);
    const std::size_t n = standardized.size();

    std::vector<TailPoint> points;
    points.reserve(c_list.size());
    for (double c : c_list) {
        long exceed = 0;
        for (double x : standardized) {
            if (x >= c) ++exceed;
        }
        TailPoint point;
        point.c = c;
        point.p_hat = static_cast<double>(exceed) / static_cast<double>(n);
        point.p_std_error = binomial_std_error(point.p_hat, n);
        point.gaussian_tail = 1.0 - normal_cdf(c);
        point.log_ratio =
            (c > 0.0 && point.p_hat > 0.0)
                ? std::log(point.p_hat) / (c * c)
                : std::numeric_limits<double>::quiet_NaN();
        point.exceedances = exceed;
        point.few_exceedances = exceed < kFewExceedances;
        points.push_back(point);
    }
    return points;
}

std::vector<TailPoint> md_experiment(double r, const TestFunction& h,
                                     const std::vector<double>& c_list,
                                     long samples, std::uint64_t seed) {
    require_samples(samples, 100000, "tail experiment");
    return md_experiment(sample_deviations(r, h, samples, seed), h, c_list);
}

ResponseResult linear_response_experiment(const DeviationSamples& samples,
                                          const TestFunction& h,
                                          const std::vector<double>& lambdas,
                                          std::uint64_t seed) {
    TiltedSamples tilted;
    tilted.failures = samples.failures;
    tilted.values.reserve(samples.deviations.size());
    const double r2 = samples.r * samples.r;
    for (double dev : samples.deviations) {
        tilted.values.push_back(r2 * dev);
    }
    const double target = 0.5 * h.laplacian_norm_sq * sigma_zero_sq();
    return response_from_values(tilted, samples.r, lambdas, seed,
                                ResponseForm::Zeros, target);
}

ResponseResult linear_response_experiment(double r, const TestFunction& h,
                                          const std::vector<double>& lambdas,
                                          long samples, std::uint64_t seed,
                                          ResponseForm form) {
    if (!(r > 0.0)) throw std::invalid_argument("scale r must be positive");
    require_samples(samples, 100, "response experiment");
    if (form == ResponseForm::Zeros) {
        return linear_response_experiment(
            sample_deviations(r, h, samples, seed), h, lambdas, seed);
    }
    const double target = 0.5 * h.norm_sq * sigma_x_sq();
    return response_from_values(sample_field_integrals(r, h, samples, seed),
                                r, lambdas, seed, ResponseForm::Field, target);
}

}  // namespace fieldsim
