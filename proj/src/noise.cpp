#include "fieldsim/noise.hpp"

#include <cmath>
#include <numbers>

#include "fieldsim/rng.hpp"

namespace fieldsim {

NoiseGrid sample_white_noise(const Lattice& lattice, bool complex_noise,
                             std::uint64_t seed, std::uint64_t stream) {
    NoiseGrid g;
    g.lattice = lattice;
    g.complex_noise = complex_noise;
    g.seed = seed;
    g.stream = stream;
    const std::size_t n = lattice.size();
    const double scale = std::sqrt(lattice.cell_volume());
    g.re.resize(n);
    if (complex_noise) g.im.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto [x, y] = normal_pair(seed, stream, static_cast<std::uint64_t>(k));
        if (complex_noise) {
            // (x + iy)/sqrt(2) scaled: each part has variance volume/2.
            const double half = scale * std::numbers::sqrt2 / 2.0;
            g.re[k] = half * x;
            g.im[k] = half * y;
        } else {
            g.re[k] = scale * x;
        }
    }
    return g;
}

}  // namespace fieldsim
