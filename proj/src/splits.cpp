#include "fieldsim/splits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "fieldsim/exact.hpp"
#include "fieldsim/quadrature.hpp"
#include "fieldsim/synthesizer.hpp"

namespace fieldsim {

int coordinate_sign(double t) { return t < 0.0 ? -1 : +1; }

int fnz(int a, int b) {
    const auto valid = [](int s) { return s == -1 || s == 0 || s == 1; };
    if (!valid(a) || !valid(b)) {
        throw std::invalid_argument("fnz: arguments must lie in {-1,0,+1}");
    }
    return a != 0 ? a : b;
}

// --- 1D split -------------------------------------------------------------

SplitTriple1D split_noise_1d(const Lattice& lattice, bool complex_noise,
                             std::uint64_t seed, std::uint64_t stream) {
    if (lattice.dim != 1) {
        throw std::invalid_argument("split_noise_1d: lattice must be 1D");
    }
    SplitTriple1D triple;
    triple.lattice = lattice;
    triple.complex_noise = complex_noise;
    triple.seed = seed;
    // Sub-streams 2*stream and 2*stream+1 keep distinct samples independent.
    triple.minus = sample_white_noise(lattice, complex_noise, seed, 2 * stream);
    triple.plus =
        sample_white_noise(lattice, complex_noise, seed, 2 * stream + 1);

    triple.zero = triple.minus;
    triple.zero.stream = 2 * stream;  // provenance only; values glued below
    const int n = lattice.half_count();
    for (int i = -n; i <= n; ++i) {
        if (coordinate_sign(lattice.node1(i)) >= 0) {
            const std::size_t k = lattice.index(i, 0);
            triple.zero.re[k] = triple.plus.re[k];
            if (complex_noise) triple.zero.im[k] = triple.plus.im[k];
        }
    }
    return triple;
}

// --- 2D two-fold split ----------------------------------------------------

std::size_t TwoSplitNoise::corner_index(int a, int b) {
    if ((a != -1 && a != 1) || (b != -1 && b != 1)) {
        throw std::invalid_argument(
            "TwoSplitNoise: corner labels must be -1 or +1");
    }
    return static_cast<std::size_t>(a > 0 ? 2 : 0) +
           static_cast<std::size_t>(b > 0 ? 1 : 0);
}

const NoiseGrid& TwoSplitNoise::corner(int a, int b) const {
    return corners[corner_index(a, b)];
}

NoiseGrid TwoSplitNoise::member(int alpha, int beta) const {
    NoiseGrid out = corners[0];
    const int n = lattice.half_count();
    for (int i = -n; i <= n; ++i) {
        for (int j = -n; j <= n; ++j) {
            const auto node = lattice.node(i, j);
            const int a = fnz(alpha, coordinate_sign(node[0]));
            const int b = fnz(beta, coordinate_sign(node[1]));
            const NoiseGrid& src = corner(a, b);
            const std::size_t k = lattice.index(i, j);
            out.re[k] = src.re[k];
            if (complex_noise) out.im[k] = src.im[k];
        }
    }
    return out;
}

TwoSplitNoise two_split_noise(const Lattice& lattice, bool complex_noise,
                              std::uint64_t seed, std::uint64_t stream) {
    if (lattice.dim != 2) {
        throw std::invalid_argument("two_split_noise: lattice must be 2D");
    }
    TwoSplitNoise noise;
    noise.lattice = lattice;
    noise.complex_noise = complex_noise;
    noise.seed = seed;
    for (std::size_t c = 0; c < 4; ++c) {
        noise.corners[c] =
            sample_white_noise(lattice, complex_noise, seed, 4 * stream + c);
    }
    return noise;
}

// --- Convolved split families --------------------------------------------

std::size_t SplitFields::member_index(int alpha, int beta) {
    const auto valid = [](int s) { return s == -1 || s == 0 || s == 1; };
    if (!valid(alpha) || !valid(beta)) {
        throw std::invalid_argument(
            "SplitFields: member labels must lie in {-1,0,+1}");
    }
    return static_cast<std::size_t>(alpha + 1) * 3 +
           static_cast<std::size_t>(beta + 1);
}

const std::vector<std::complex<double>>& SplitFields::member(int alpha,
                                                             int beta) const {
    return members[member_index(alpha, beta)];
}

SplitFields synthesize_split_fields(const KernelSpec& kernel,
                                    const TwoSplitNoise& noise,
                                    const Lattice& eval_lattice,
                                    double tail_tol) {
    if (eval_lattice.dim != 2) {
        throw std::invalid_argument(
            "synthesize_split_fields: evaluation lattice must be 2D");
    }
    SplitFields out;
    out.noise_lattice = noise.lattice;
    out.eval_lattice = eval_lattice;
    out.kernel = kernel;
    out.complex_valued = kernel.complex_valued || noise.complex_noise;

    std::vector<std::array<double, 2>> points;
    points.reserve(eval_lattice.size());
    const int n = eval_lattice.half_count();
    for (int i = -n; i <= n; ++i) {
        for (int j = -n; j <= n; ++j) {
            points.push_back(eval_lattice.node(i, j));
        }
    }
    const NonstationarySynthesizer synth(kernel, noise.lattice,
                                         std::move(points),
                                         noise.complex_noise, tail_tol);

    for (int alpha = -1; alpha <= 1; ++alpha) {
        for (int beta = -1; beta <= 1; ++beta) {
            const NoiseGrid assembled = noise.member(alpha, beta);
            const FieldGrid field = synth.apply(assembled);
            auto& dst = out.members[SplitFields::member_index(alpha, beta)];
            dst.resize(field.re.size());
            for (std::size_t k = 0; k < field.re.size(); ++k) {
                dst[k] = field.value(k);
            }
        }
    }
    return out;
}

namespace {

// Shared leak assembly: canonical evaluation order so that every caller sees
// bit-identical fields.
template <typename Member>
void assemble_leaks(const Lattice& lattice, const Member& member,
                    std::vector<std::complex<double>>& leak1,
                    std::vector<std::complex<double>>& leak2,
                    std::vector<std::complex<double>>& leak12) {
    const int n = lattice.half_count();
    const std::size_t total = lattice.size();
    leak1.resize(total);
    leak2.resize(total);
    leak12.resize(total);
    for (int i = -n; i <= n; ++i) {
        for (int j = -n; j <= n; ++j) {
            const auto node = lattice.node(i, j);
            const int s1 = coordinate_sign(node[0]);
            const int s2 = coordinate_sign(node[1]);
            const std::size_t k = lattice.index(i, j);
            const std::complex<double> g_ss = member(s1, s2, k);
            const std::complex<double> g_s0 = member(s1, 0, k);
            const std::complex<double> g_0s = member(0, s2, k);
            const std::complex<double> g_00 = member(0, 0, k);
            leak1[k] = g_s0 - g_00;
            leak2[k] = g_0s - g_00;
            leak12[k] = (g_ss - g_0s) - (g_s0 - g_00);
        }
    }
}

}  // namespace

LeakFields leak_fields(const SplitFields& fields) {
    LeakFields out;
    out.lattice = fields.eval_lattice;
    out.complex_valued = fields.complex_valued;
    assemble_leaks(
        fields.eval_lattice,
        [&fields](int a, int b, std::size_t k) { return fields.member(a, b)[k]; },
        out.leak1, out.leak2, out.leak12);
    return out;
}

LeakFields leak_fields(const KernelSpec& kernel, const TwoSplitNoise& noise,
                       const Lattice& eval_lattice, double tail_tol) {
    return leak_fields(
        synthesize_split_fields(kernel, noise, eval_lattice, tail_tol));
}

// --- Leak kernels ---------------------------------------------------------

std::complex<double> LeakKernel::evaluate(std::array<double, 2> t,
                                          std::array<double, 2> s) const {
    const int t1 = coordinate_sign(t[0]);
    const int t2 = coordinate_sign(t[1]);
    const int s1 = coordinate_sign(s[0]);
    const int s2 = coordinate_sign(s[1]);
    if (which == 1) {
        if (s1 != -t1) return 0.0;
        return std::numbers::sqrt2 * static_cast<double>(t1) *
               base.evaluate(t, s);
    }
    if (which == 2) {
        if (s2 != -t2) return 0.0;
        return std::numbers::sqrt2 * static_cast<double>(t2) *
               base.evaluate(t, s);
    }
    if (s1 != -t1 || s2 != -t2) return 0.0;
    return 2.0 * static_cast<double>(t1) * static_cast<double>(t2) *
           base.evaluate(t, s);
}

LeakKernel leak_kernel(const KernelSpec& kernel, int which) {
    if (which != 1 && which != 2 && which != 12) {
        throw std::invalid_argument("leak_kernel: which must be 1, 2, or 12");
    }
    if (kernel.dim != 2) {
        throw std::invalid_argument("leak_kernel: base kernel must be 2D");
    }
    LeakKernel out;
    out.which = which;
    out.base = kernel;
    return out;
}

namespace {

// Integral of f over a coordinate half-line: s < 0 when sign = -1, s >= 0
// when sign = +1.
double integrate_half_line(const std::function<double(double)>& f, int sign) {
    if (sign > 0) {
        return integrate_upper_infinite(f, 0.0, 1e-10, 1e-7);
    }
    return integrate_upper_infinite([&f](double x) { return f(-x); }, 0.0,
                                    1e-10, 1e-7);
}

}  // namespace

double leak_covariance_quadrature(const LeakKernel& kernel,
                                  std::array<double, 2> t,
                                  std::array<double, 2> u) {
    if (kernel.base.complex_valued) {
        throw std::invalid_argument(
            "leak_covariance_quadrature: real-valued base kernels only");
    }
    const auto product = [&](double s1, double s2) {
        const std::array<double, 2> s{s1, s2};
        return kernel.evaluate(t, s).real() * kernel.evaluate(u, s).real();
    };
    const int t1 = coordinate_sign(t[0]);
    const int t2 = coordinate_sign(t[1]);
    const int u1 = coordinate_sign(u[0]);
    const int u2 = coordinate_sign(u[1]);

    if (kernel.which == 1) {
        if (t1 != u1) return 0.0;  // disjoint source half-planes
        return integrate_half_line(
            [&](double s1) {
                return integrate_real_line(
                    [&](double s2) { return product(s1, s2); }, 1e-10, 1e-7);
            },
            -t1);
    }
    if (kernel.which == 2) {
        if (t2 != u2) return 0.0;
        return integrate_half_line(
            [&](double s2) {
                return integrate_real_line(
                    [&](double s1) { return product(s1, s2); }, 1e-10, 1e-7);
            },
            -t2);
    }
    if (t1 != u1 || t2 != u2) return 0.0;
    return integrate_half_line(
        [&](double s1) {
            return integrate_half_line(
                [&](double s2) { return product(s1, s2); }, -t2);
        },
        -t1);
}

// --- Pointwise transforms -------------------------------------------------

PointwiseMap identity_map() {
    PointwiseMap m;
    m.name = "identity";
    m.f = [](std::complex<double> z) { return z; };
    m.lipschitz = 1.0;
    return m;
}

PointwiseMap half_map() {
    PointwiseMap m;
    m.name = "half";
    m.f = [](std::complex<double> z) { return 0.5 * z; };
    m.lipschitz = 0.5;
    return m;
}

PointwiseMap abs_map() {
    PointwiseMap m;
    m.name = "abs";
    m.f = [](std::complex<double> z) {
        return std::complex<double>(std::fabs(z.real()), 0.0);
    };
    m.lipschitz = 1.0;
    return m;
}

PointwiseMap clamp_map(double bound) {
    PointwiseMap m;
    m.name = "clamp";
    m.f = [bound](std::complex<double> z) {
        return std::complex<double>(std::clamp(z.real(), -bound, bound), 0.0);
    };
    m.lipschitz = 1.0;
    return m;
}

PointwiseMap log_abs_map() {
    PointwiseMap m;
    m.name = "log-abs";
    m.f = [](std::complex<double> z) {
        return std::complex<double>(std::log(std::abs(z)), 0.0);
    };
    m.lipschitz = 0.0;  // no global constant
    m.singular_at = [](std::complex<double> z) {
        return std::abs(z) < 1e-300;
    };
    return m;
}

const std::vector<std::complex<double>>& TransformedSplit::member(
    int alpha, int beta) const {
    return members[SplitFields::member_index(alpha, beta)];
}

TransformedSplit apply_pointwise(const PointwiseMap& psi,
                                 const SplitFields& fields) {
    if (!psi.f) {
        throw std::invalid_argument("apply_pointwise: map not callable");
    }
    const Lattice& lattice = fields.eval_lattice;
    const std::size_t total = lattice.size();

    TransformedSplit out;
    out.lattice = lattice;
    out.complex_valued = fields.complex_valued;
    out.singular.assign(total, 0);

    for (std::size_t k = 0; k < total; ++k) {
        if (!psi.singular_at) break;
        for (const auto& member : fields.members) {
            if (psi.singular_at(member[k])) {
                out.singular[k] = 1;
                ++out.singular_count;
                break;
            }
        }
    }

    // One shared centering constant from the reference member; it cancels in
    // every leak, which are therefore formed from uncentered values.
    std::array<std::vector<std::complex<double>>, 9> raw;
    for (std::size_t m = 0; m < 9; ++m) {
        raw[m].resize(total);
        for (std::size_t k = 0; k < total; ++k) {
            raw[m][k] = out.singular[k] ? 0.0 : psi.f(fields.members[m][k]);
        }
    }
    const auto& reference = raw[SplitFields::member_index(0, 0)];
    std::complex<double> mean{0.0, 0.0};
    std::size_t used = 0;
    for (std::size_t k = 0; k < total; ++k) {
        if (out.singular[k]) continue;
        mean += reference[k];
        ++used;
    }
    out.center = used > 0 ? mean / static_cast<double>(used)
                          : std::complex<double>{0.0, 0.0};

    for (std::size_t m = 0; m < 9; ++m) {
        out.members[m].resize(total);
        for (std::size_t k = 0; k < total; ++k) {
            out.members[m][k] = out.singular[k] ? 0.0 : raw[m][k] - out.center;
        }
    }

    assemble_leaks(
        lattice,
        [&raw](int a, int b, std::size_t k) {
            return raw[SplitFields::member_index(a, b)][k];
        },
        out.leak1, out.leak2, out.leak12);
    for (std::size_t k = 0; k < total; ++k) {
        if (!out.singular[k]) continue;
        out.leak1[k] = 0.0;
        out.leak2[k] = 0.0;
        out.leak12[k] = 0.0;
    }
    return out;
}

// --- Discrete 1D convolution ----------------------------------------------

ConvolvedTriple convolve_split(const DiscreteKernel1D& mu,
                               const SplitTriple1D& triple) {
    if (mu.taps.empty()) {
        throw std::invalid_argument("convolve_split: kernel has no taps");
    }
    if (triple.lattice.dim != 1) {
        throw std::invalid_argument("convolve_split: triple must be 1D");
    }
    if (triple.complex_noise) {
        throw std::invalid_argument(
            "convolve_split: real-valued triples only");
    }
    const int n = triple.lattice.half_count();
    long max_offset = 0;
    for (const auto& [offset, weight] : mu.taps) {
        (void)weight;
        max_offset = std::max(max_offset, std::labs(offset));
    }
    if (max_offset > n) {
        throw std::invalid_argument(
            "convolve_split: tap offsets exceed the lattice");
    }

    ConvolvedTriple out;
    out.lattice = triple.lattice;
    out.valid_half_count = n - max_offset;
    const long v = out.valid_half_count;
    const std::size_t count = static_cast<std::size_t>(2 * v + 1);
    out.zero.resize(count);
    out.minus.resize(count);
    out.plus.resize(count);
    out.leak.resize(count);

    const auto convolve_at = [&](const std::vector<double>& x, long i) {
        double acc = 0.0;
        for (const auto& [offset, weight] : mu.taps) {
            acc += weight *
                   x[triple.lattice.index(static_cast<int>(i - offset), 0)];
        }
        return acc;
    };

    bool dominated = true;
    for (long i = -v; i <= v; ++i) {
        const std::size_t k = static_cast<std::size_t>(i + v);
        out.zero[k] = convolve_at(triple.zero.re, i);
        out.minus[k] = convolve_at(triple.minus.re, i);
        out.plus[k] = convolve_at(triple.plus.re, i);
        out.leak[k] = out.plus[k] - out.zero[k];

        // Exact domination check: |sum w_j d_j| <= sum |w_j| |d_j| decided in
        // expansion arithmetic, immune to rounding of the double-path values.
        Expansion lhs, rhs;
        for (const auto& [offset, weight] : mu.taps) {
            const std::size_t cell =
                triple.lattice.index(static_cast<int>(i - offset), 0);
            const Expansion d = grow_expansion(
                expansion_from(triple.plus.re[cell]), -triple.zero.re[cell]);
            Expansion weighted = expansion_scale(d, weight);
            lhs = expansion_sum(lhs, weighted);
            if (expansion_sign(weighted) < 0) {
                weighted = expansion_negate(weighted);
            }
            rhs = expansion_sum(rhs, weighted);
        }
        if (expansion_sign(lhs) < 0) lhs = expansion_negate(lhs);
        const Expansion gap = expansion_sum(rhs, expansion_negate(lhs));
        if (expansion_sign(gap) < 0) dominated = false;
    }
    out.domination_ok = dominated;
    return out;
}

// --- Exponential moments --------------------------------------------------

double region_integral(
    const std::vector<std::complex<double>>& values, const Lattice& lattice,
    const std::function<bool(std::array<double, 2>)>& region) {
    if (values.size() != lattice.size()) {
        throw std::invalid_argument(
            "region_integral: value count does not match the lattice");
    }
    const int n = lattice.half_count();
    const double vol = lattice.cell_volume();
    double acc = 0.0;
    if (lattice.dim == 1) {
        for (int i = -n; i <= n; ++i) {
            const std::array<double, 2> node{lattice.node1(i), 0.0};
            if (!region(node)) continue;
            acc += std::abs(values[lattice.index(i, 0)]) * vol;
        }
        return acc;
    }
    for (int i = -n; i <= n; ++i) {
        for (int j = -n; j <= n; ++j) {
            const auto node = lattice.node(i, j);
            if (!region(node)) continue;
            acc += std::abs(values[lattice.index(i, j)]) * vol;
        }
    }
    return acc;
}

ExpMomentResult exp_moment(std::span<const double> integrals, double c) {
    if (integrals.size() < 100) {
        throw std::invalid_argument("exp_moment: need at least 100 samples");
    }
    if (!(c > 0.0)) {
        throw std::invalid_argument("exp_moment: rate must be positive");
    }
    ExpMomentResult out;
    out.n = static_cast<int>(integrals.size());
    std::vector<double> values(integrals.size());
    bool finite = true;
    for (std::size_t i = 0; i < integrals.size(); ++i) {
        values[i] = std::exp(c * integrals[i]);
        finite = finite && std::isfinite(values[i]);
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    out.estimate = mean;
    out.std_error = std::sqrt(
        ss / (static_cast<double>(values.size()) - 1.0) /
        static_cast<double>(values.size()));

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const std::size_t top =
        std::max<std::size_t>(1, sorted.size() / 100);
    double top_sum = 0.0;
    for (std::size_t i = 0; i < top; ++i) top_sum += sorted[i];
    const double total = mean * static_cast<double>(values.size());
    out.top_share = total > 0.0 ? top_sum / total : 0.0;
    out.heavy_tail = !finite || out.top_share > 0.5;
    if (!finite) {
        out.estimate = std::numeric_limits<double>::infinity();
        out.std_error = std::numeric_limits<double>::infinity();
        out.top_share = 1.0;
    }
    return out;
}

// --- Splittability verification -------------------------------------------

namespace {

double sqrt_two_over_pi() { return std::sqrt(2.0 / std::numbers::pi); }

// Exponent bias bound for the truncated strip R x [0,1): the leak variance
// at distance x from the boundary line is at most twice the kernel L2 tail
// beyond x, and a centered Gaussian Y has E|Y| = sqrt(2/pi) sd(Y).
double strip_tail_bound(const KernelSpec& kernel, double lipschitz, double c,
                        double extent) {
    if (!(lipschitz > 0.0)) return -1.0;
    const double integral = integrate_upper_infinite(
        [&kernel](double x) {
            return std::sqrt(2.0 * std::max(0.0, kernel.l2_tail(x)));
        },
        extent, 1e-10, 1e-6);
    return (lipschitz / c) * sqrt_two_over_pi() * 2.0 * integral;
}

double plane_tail_bound(const KernelSpec& kernel, double lipschitz, double c,
                        double extent) {
    if (!(lipschitz > 0.0)) return -1.0;
    const double integral = integrate_upper_infinite(
        [&kernel](double r) {
            return 2.0 * std::numbers::pi * r * 2.0 *
                   std::sqrt(std::max(0.0, kernel.l2_tail(r)));
        },
        extent, 1e-10, 1e-6);
    return (lipschitz / c) * sqrt_two_over_pi() * integral;
}

}  // namespace

SplittabilityReport verify_splittability_conditions(
    const KernelSpec& kernel, const PointwiseMap& psi, double c_scale,
    const Lattice& noise_lattice, const Lattice& eval_lattice, int n_samples,
    std::uint64_t seed) {
    if (n_samples < 100) {
        throw std::invalid_argument(
            "verify_splittability_conditions: need at least 100 samples");
    }
    if (!(c_scale > 0.0)) {
        throw std::invalid_argument(
            "verify_splittability_conditions: scale must be positive");
    }
    const bool complex_noise = kernel.complex_valued;

    // Pilot pass for the shared centering constant of condition a1.
    const int n_pilot = std::min(n_samples, 200);
    std::complex<double> center{0.0, 0.0};
    std::size_t center_count = 0;
    for (int p = 0; p < n_pilot; ++p) {
        const auto noise =
            two_split_noise(noise_lattice, complex_noise, seed,
                            static_cast<std::uint64_t>(n_samples + p));
        const auto fields = synthesize_split_fields(kernel, noise, eval_lattice);
        const auto& reference = fields.member(0, 0);
        for (const auto& value : reference) {
            if (psi.singular_at && psi.singular_at(value)) continue;
            center += psi.f(value);
            ++center_count;
        }
    }
    if (center_count > 0) center /= static_cast<double>(center_count);

    const auto unit_square = [](std::array<double, 2> t) {
        return t[0] >= 0.0 && t[0] < 1.0 && t[1] >= 0.0 && t[1] < 1.0;
    };
    const auto strip1 = [](std::array<double, 2> t) {
        return t[1] >= 0.0 && t[1] < 1.0;
    };
    const auto strip2 = [](std::array<double, 2> t) {
        return t[0] >= 0.0 && t[0] < 1.0;
    };
    const auto everywhere = [](std::array<double, 2>) { return true; };

    std::array<std::vector<double>, 4> integrals;
    for (auto& v : integrals) v.reserve(static_cast<std::size_t>(n_samples));

    for (int i = 0; i < n_samples; ++i) {
        const auto noise = two_split_noise(noise_lattice, complex_noise, seed,
                                           static_cast<std::uint64_t>(i));
        const auto fields = synthesize_split_fields(kernel, noise, eval_lattice);
        const auto transformed = apply_pointwise(psi, fields);

        // a1 uses the globally centered member, not the per-sample centering.
        std::vector<std::complex<double>> member_centered(
            fields.member(0, 0).size());
        for (std::size_t k = 0; k < member_centered.size(); ++k) {
            member_centered[k] = transformed.singular[k]
                                     ? 0.0
                                     : psi.f(fields.member(0, 0)[k]) - center;
        }
        integrals[0].push_back(
            region_integral(member_centered, eval_lattice, unit_square));
        integrals[1].push_back(
            region_integral(transformed.leak1, eval_lattice, strip1));
        integrals[2].push_back(
            region_integral(transformed.leak2, eval_lattice, strip2));
        integrals[3].push_back(
            region_integral(transformed.leak12, eval_lattice, everywhere));
    }

    SplittabilityReport report;
    const std::array<std::string, 4> names{"a1", "a2", "a3", "a4"};
    const std::array<std::string, 4> regions{
        "member on [0,1)^2", "1-leak on R x [0,1)", "2-leak on [0,1) x R",
        "double leak on R^2"};
    const double extent = eval_lattice.half_extent;
    const std::array<double, 4> tails{
        0.0, strip_tail_bound(kernel, psi.lipschitz, c_scale, extent),
        strip_tail_bound(kernel, psi.lipschitz, c_scale, extent),
        plane_tail_bound(kernel, psi.lipschitz, c_scale, extent)};

    bool all = true;
    for (std::size_t k = 0; k < 4; ++k) {
        const auto est = exp_moment(integrals[k], 1.0 / c_scale);
        SplitCondition& cond = report.conditions[k];
        cond.name = names[k];
        cond.region = regions[k];
        cond.c_scale = c_scale;
        cond.estimate = est.estimate;
        cond.std_error = est.std_error;
        cond.tail_bound = tails[k];
        cond.n = est.n;
        cond.heavy_tail = est.heavy_tail;
        cond.pass = est.estimate <= 2.0;
        all = all && cond.pass;
    }

    // Shift-transport residual of the kernel itself (trivial phases for
    // stationary kernels, wedge phases for the planar-analytic one).
    PhaseSpec phases;
    if (kernel.kind == KernelKind::PlanarAnalytic) {
        phases = planar_analytic_phases();
    } else {
        phases.tau1 = [](const std::array<double, 2>&,
                         const std::array<double, 2>&) {
            return std::complex<double>{1.0, 0.0};
        };
        phases.tau2 = phases.tau1;
    }
    const std::vector<std::array<double, 2>> shifts{
        {0.5, -1.25}, {2.0, 0.75}, {-1.5, 0.5}};
    const std::vector<std::pair<std::array<double, 2>, std::array<double, 2>>>
        pairs{{{0.25, 0.5}, {-0.75, 1.0}},
              {{1.25, -0.5}, {0.5, 0.25}},
              {{-0.25, -1.0}, {0.75, -0.5}}};
    report.phase_residual = verify_phase_covariance(kernel, phases, shifts, pairs);
    report.phase_pass = report.phase_residual < 1e-10;
    report.all_pass = all && report.phase_pass;
    return report;
}

}  // namespace fieldsim
