#pragma once

// White-noise grids: independent Gaussian cell integrals over a lattice.
// A real cell has variance = cell volume; a complex cell has independent real
// and imaginary parts of variance volume/2 each, so E|W|^2 = volume.

#include <complex>
#include <cstdint>
#include <vector>

#include "fieldsim/lattice.hpp"

namespace fieldsim {

struct NoiseGrid {
    Lattice lattice;
    bool complex_noise = false;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<double> re;  // size lattice.size()
    std::vector<double> im;  // empty for real noise

    std::complex<double> value(std::size_t k) const {
        return {re[k], complex_noise ? im[k] : 0.0};
    }
};

// Deterministic in (seed, stream): each cell value is a pure function of
// (seed, stream, cell index), so identical seeds reproduce identical grids
// regardless of evaluation order.
NoiseGrid sample_white_noise(const Lattice& lattice, bool complex_noise,
                             std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace fieldsim
