#pragma once

// Counter-based random number generation.  Every random quantity in the
// toolkit is a pure function of (seed, stream, index), which makes sampling
// order-independent: parallel and serial runs, or runs that evaluate only a
// subset of cells, produce bit-identical values.

#include <array>
#include <complex>
#include <cstdint>
#include <string_view>
#include <utility>

namespace fieldsim {

// Philox 4x32-10 block cipher (counter-based PRNG).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Two 64-bit uniform words for a given (seed, stream, index) triple.
std::array<std::uint64_t, 2> random_words(std::uint64_t seed,
                                          std::uint64_t stream,
                                          std::uint64_t index);

// A pair of independent standard normal variates (Box-Muller transform of the
// two words above).  Deterministic in (seed, stream, index).
std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t stream,
                                      std::uint64_t index);

// Standard complex normal with E|Z|^2 = 1 (real and imaginary parts are
// independent N(0, 1/2)).
std::complex<double> complex_normal(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index);

// Uniform double in [0, 1) from the first word.
double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Stable 64-bit hash used to derive child seeds, e.g.
// stable_hash64(master, "experiment-name", sample).  Fixed byte order, so the
// value is identical across platforms and runs.
std::uint64_t stable_hash64(std::uint64_t seed, std::string_view name,
                            std::uint64_t index);

}  // namespace fieldsim
