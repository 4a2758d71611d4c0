#include "fieldsim/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "fieldsim/synthesizer.hpp"

namespace fieldsim {
namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// In-place forward/backward c2c transform (rank 1 or 2, square in rank 2).
void fft_inplace(std::vector<std::complex<double>>& data, int rank, int n,
                 int sign) {
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = rank == 1
                   ? fftw_plan_dft_1d(n, ptr, ptr, sign, FFTW_ESTIMATE)
                   : fftw_plan_dft_2d(n, n, ptr, ptr, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
}

int window_half_cells(const KernelSpec& kernel, const Lattice& lattice,
                      double tail_tol) {
    const double radius = kernel.truncation_radius(tail_tol);
    return static_cast<int>(std::ceil(radius / lattice.spacing - 1e-12));
}

std::string stationary_provenance(const KernelSpec& k) {
    switch (k.kind) {
        case KernelKind::PowerDecay:
            return "convolution:power_decay(alpha=" + std::to_string(k.alpha) + ")";
        case KernelKind::Gaussian:
            return "convolution:gaussian(width=" + std::to_string(k.width) + ")";
        case KernelKind::Custom:
            return "convolution:custom";
        case KernelKind::PlanarAnalytic:
            return "convolution:planar_analytic";
    }
    return "convolution";
}

}  // namespace

FieldGrid convolve_stationary(const KernelSpec& kernel, const NoiseGrid& noise,
                              ConvolveMethod method, double tail_tol) {
    if (!kernel.stationary())
        throw std::invalid_argument("convolve_stationary requires a stationary kernel");
    if (kernel.dim != noise.lattice.dim)
        throw std::invalid_argument("kernel/noise dimension mismatch");

    const Lattice& lat = noise.lattice;
    const int n_half = lat.half_count();
    const int k_half = window_half_cells(kernel, lat, tail_tol);
    const int out_half = n_half - k_half;
    if (out_half < 1)
        throw ExtentTooSmallError(
            "noise extent " + std::to_string(lat.half_extent) +
            " too small for kernel truncation radius " +
            std::to_string(k_half * lat.spacing));

    FieldGrid out;
    out.on_lattice = true;
    out.lattice = make_lattice(lat.spacing, out_half * lat.spacing, lat.dim,
                               lat.origin);
    out.complex_field = noise.complex_noise;
    out.provenance = stationary_provenance(kernel);

    const int n_ppa = lat.points_per_axis();
    const int k_ppa = 2 * k_half + 1;
    const int o_ppa = 2 * out_half + 1;
    const std::size_t out_size = out.lattice.size();
    out.re.assign(out_size, 0.0);
    if (out.complex_field) out.im.assign(out_size, 0.0);
    out.points.resize(out_size);
    if (lat.dim == 1) {
        for (int i = -out_half; i <= out_half; ++i)
            out.points[out.lattice.index(i, 0)] = {out.lattice.node1(i), 0.0};
    } else {
        for (int i = -out_half; i <= out_half; ++i)
            for (int j = -out_half; j <= out_half; ++j)
                out.points[out.lattice.index(i, j)] = out.lattice.node(i, j);
    }

    const bool use_fft =
        method == ConvolveMethod::Fft ||
        (method == ConvolveMethod::Automatic &&
         static_cast<double>(out_size) * std::pow(k_ppa, lat.dim) > 2e7);

    if (!use_fft) {
        // direct truncated summation over the square window
        for (int i = -out_half; i <= out_half; ++i) {
            const int jmax = lat.dim == 1 ? 0 : out_half;
            for (int j = (lat.dim == 1 ? 0 : -out_half); j <= jmax; ++j) {
                std::complex<double> acc{0.0, 0.0};
                for (int a = -k_half; a <= k_half; ++a) {
                    const int bmax = lat.dim == 1 ? 0 : k_half;
                    for (int b = (lat.dim == 1 ? 0 : -k_half); b <= bmax; ++b) {
                        const double r = lat.dim == 1
                                             ? std::abs(a * lat.spacing)
                                             : std::hypot(a * lat.spacing,
                                                          b * lat.spacing);
                        acc += kernel.radial(r) * noise.value(lat.index(i + a, j + b));
                    }
                }
                const std::size_t idx = out.lattice.index(i, j);
                out.re[idx] = acc.real();
                if (out.complex_field) out.im[idx] = acc.imag();
            }
        }
        return out;
    }

    // FFT path: zero-padded linear convolution; identical sums to the direct
    // path up to floating-point rounding.
    const int pad = n_ppa + k_ppa - 1;
    const int rank = lat.dim;
    const std::size_t total =
        rank == 1 ? static_cast<std::size_t>(pad)
                  : static_cast<std::size_t>(pad) * static_cast<std::size_t>(pad);
    std::vector<std::complex<double>> a(total, {0.0, 0.0});
    std::vector<std::complex<double>> b(total, {0.0, 0.0});

    const auto pad_index = [&](int x, int y) {
        return rank == 1 ? static_cast<std::size_t>(x)
                         : static_cast<std::size_t>(x) * pad + y;
    };
    for (int i = 0; i < n_ppa; ++i) {
        const int jmax = rank == 1 ? 1 : n_ppa;
        for (int j = 0; j < jmax; ++j)
            a[pad_index(i, j)] = noise.value(lat.index(i - n_half, rank == 1 ? 0 : j - n_half));
    }
    for (int i = 0; i < k_ppa; ++i) {
        const int jmax = rank == 1 ? 1 : k_ppa;
        for (int j = 0; j < jmax; ++j) {
            const double r = rank == 1 ? std::abs((i - k_half) * lat.spacing)
                                       : std::hypot((i - k_half) * lat.spacing,
                                                    (j - k_half) * lat.spacing);
            b[pad_index(i, j)] = kernel.radial(r);
        }
    }
    fft_inplace(a, rank, pad, FFTW_FORWARD);
    fft_inplace(b, rank, pad, FFTW_FORWARD);
    for (std::size_t k = 0; k < total; ++k) a[k] *= b[k];
    fft_inplace(a, rank, pad, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(total);

    for (int i = 0; i < o_ppa; ++i) {
        const int jmax = rank == 1 ? 1 : o_ppa;
        for (int j = 0; j < jmax; ++j) {
            const std::complex<double> v =
                a[pad_index(i + 2 * k_half, rank == 1 ? 0 : j + 2 * k_half)] * scale;
            const std::size_t idx =
                out.lattice.index(i - out_half, rank == 1 ? 0 : j - out_half);
            out.re[idx] = v.real();
            if (out.complex_field) out.im[idx] = v.imag();
        }
    }
    return out;
}

NonstationarySynthesizer::NonstationarySynthesizer(
    const KernelSpec& kernel, const Lattice& noise_lattice,
    std::vector<std::array<double, 2>> eval_points, bool complex_noise,
    double tail_tol)
    : kernel_(kernel),
      lattice_(noise_lattice),
      points_(std::move(eval_points)),
      complex_noise_(complex_noise),
      complex_field_(complex_noise || kernel.complex_valued) {
    const double radius = kernel_.truncation_radius(tail_tol);
    const double d = lattice_.spacing;
    const int n_half = lattice_.half_count();
    rows_.reserve(points_.size());
    for (const auto& t : points_) {
        double inscribed = lattice_.half_extent - std::abs(t[0] - lattice_.origin[0]);
        if (lattice_.dim == 2)
            inscribed = std::min(inscribed,
                                 lattice_.half_extent - std::abs(t[1] - lattice_.origin[1]));
        if (inscribed < radius)
            throw ExtentTooSmallError(
                "kernel row at (" + std::to_string(t[0]) + ", " +
                std::to_string(t[1]) + ") extends past the noise lattice; need " +
                std::to_string(radius) + ", have " + std::to_string(inscribed));

        Row row;
        const int ilo = std::max(-n_half,
                                 static_cast<int>(std::ceil((t[0] - radius - lattice_.origin[0]) / d)));
        const int ihi = std::min(n_half,
                                 static_cast<int>(std::floor((t[0] + radius - lattice_.origin[0]) / d)));
        int jlo = 0, jhi = 0;
        if (lattice_.dim == 2) {
            jlo = std::max(-n_half,
                           static_cast<int>(std::ceil((t[1] - radius - lattice_.origin[1]) / d)));
            jhi = std::min(n_half,
                           static_cast<int>(std::floor((t[1] + radius - lattice_.origin[1]) / d)));
        }
        for (int i = ilo; i <= ihi; ++i) {
            for (int j = jlo; j <= jhi; ++j) {
                const auto s = lattice_.dim == 1
                                   ? std::array<double, 2>{lattice_.node1(i), 0.0}
                                   : lattice_.node(i, j);
                row.cells.push_back(lattice_.index(i, j));
                row.weights.push_back(kernel_.evaluate(t, s));
            }
        }
        rows_.push_back(std::move(row));
    }
}

FieldGrid NonstationarySynthesizer::apply(const NoiseGrid& noise) const {
    if (!covers(noise.lattice, lattice_) || !covers(lattice_, noise.lattice))
        throw std::invalid_argument("noise grid lattice differs from synthesizer lattice");
    if (noise.complex_noise != complex_noise_)
        throw std::invalid_argument("noise kind differs from synthesizer configuration");

    FieldGrid out;
    out.on_lattice = false;
    out.points = points_;
    out.complex_field = complex_field_;
    out.provenance = "row_synthesis";
    out.re.assign(points_.size(), 0.0);
    if (complex_field_) out.im.assign(points_.size(), 0.0);

    for (std::size_t p = 0; p < rows_.size(); ++p) {
        const Row& row = rows_[p];
        double acc_re = 0.0, acc_im = 0.0;
        if (noise.complex_noise) {
            for (std::size_t k = 0; k < row.cells.size(); ++k) {
                const std::complex<double> w = row.weights[k];
                const double nr = noise.re[row.cells[k]];
                const double ni = noise.im[row.cells[k]];
                acc_re += w.real() * nr - w.imag() * ni;
                acc_im += w.real() * ni + w.imag() * nr;
            }
        } else {
            for (std::size_t k = 0; k < row.cells.size(); ++k) {
                const std::complex<double> w = row.weights[k];
                const double nr = noise.re[row.cells[k]];
                acc_re += w.real() * nr;
                acc_im += w.imag() * nr;
            }
        }
        out.re[p] = acc_re;
        if (complex_field_) out.im[p] = acc_im;
    }
    return out;
}

FieldGrid NonstationarySynthesizer::sample(std::uint64_t seed,
                                           std::uint64_t stream) const {
    return apply(sample_white_noise(lattice_, complex_noise_, seed, stream));
}

FieldGrid synthesize_nonstationary(const KernelSpec& kernel,
                                   const NoiseGrid& noise,
                                   const std::vector<std::array<double, 2>>& eval_points,
                                   double tail_tol) {
    NonstationarySynthesizer synth(kernel, noise.lattice, eval_points,
                                   noise.complex_noise, tail_tol);
    return synth.apply(noise);
}

CovarianceMatrix empirical_covariance(const std::vector<FieldGrid>& samples,
                                      const std::vector<std::size_t>& indices,
                                      int n_batches) {
    if (samples.size() < 2)
        throw std::invalid_argument("empirical_covariance needs at least 2 samples");
    const std::size_t n = samples.size();
    const std::size_t m = indices.size();
    const int nb = std::max(2, std::min<int>(n_batches, static_cast<int>(n)));

    CovarianceMatrix out;
    out.n_points = m;
    out.value.assign(m * m, {0.0, 0.0});
    out.std_error.assign(m * m, 0.0);

    std::vector<std::complex<double>> batch_sum(static_cast<std::size_t>(nb));
    std::vector<std::size_t> batch_count(static_cast<std::size_t>(nb));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            std::fill(batch_sum.begin(), batch_sum.end(), std::complex<double>{});
            std::fill(batch_count.begin(), batch_count.end(), 0);
            for (std::size_t k = 0; k < n; ++k) {
                const auto b = static_cast<std::size_t>(
                    (static_cast<unsigned long long>(k) * nb) / n);
                batch_sum[b] += samples[k].value(indices[i]) *
                                std::conj(samples[k].value(indices[j]));
                batch_count[b] += 1;
            }
            std::complex<double> mean{0.0, 0.0};
            for (int b = 0; b < nb; ++b) mean += batch_sum[b];
            mean /= static_cast<double>(n);
            double var_re = 0.0, var_im = 0.0;
            for (int b = 0; b < nb; ++b) {
                const std::complex<double> bm =
                    batch_sum[b] / static_cast<double>(batch_count[b]);
                var_re += (bm.real() - mean.real()) * (bm.real() - mean.real());
                var_im += (bm.imag() - mean.imag()) * (bm.imag() - mean.imag());
            }
            var_re /= (nb - 1);
            var_im /= (nb - 1);
            const double se = std::sqrt((var_re + var_im) / nb);
            out.value[i * m + j] = mean;
            out.value[j * m + i] = std::conj(mean);
            out.std_error[i * m + j] = se;
            out.std_error[j * m + i] = se;
        }
    }
    return out;
}

}  // namespace fieldsim
