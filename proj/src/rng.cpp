#include "fieldsim/rng.hpp"

#include <cmath>
#include <numbers>

namespace fieldsim {
namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> round_once(std::array<std::uint32_t, 4> c,
                                               std::array<std::uint32_t, 2> k) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMult0, c[0], hi0, lo0);
    mulhilo(kMult1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline std::uint32_t lo32(std::uint64_t x) {
    return static_cast<std::uint32_t>(x);
}
inline std::uint32_t hi32(std::uint64_t x) {
    return static_cast<std::uint32_t>(x >> 32);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        counter = round_once(counter, key);
    }
    return counter;
}

std::array<std::uint64_t, 2> random_words(std::uint64_t seed,
                                          std::uint64_t stream,
                                          std::uint64_t index) {
    const auto out = philox4x32({lo32(index), hi32(index), lo32(stream),
                                 hi32(stream)},
                                {lo32(seed), hi32(seed)});
    const std::uint64_t w0 =
        static_cast<std::uint64_t>(out[0]) | (static_cast<std::uint64_t>(out[1]) << 32);
    const std::uint64_t w1 =
        static_cast<std::uint64_t>(out[2]) | (static_cast<std::uint64_t>(out[3]) << 32);
    return {w0, w1};
}

std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t stream,
                                      std::uint64_t index) {
    const auto w = random_words(seed, stream, index);
    // u1 in (0, 1] so that log(u1) is finite; u2 in [0, 1).
    const double u1 =
        static_cast<double>((w[0] >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(w[1] >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

std::complex<double> complex_normal(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index) {
    const auto [x, y] = normal_pair(seed, stream, index);
    return {x * std::numbers::sqrt2 / 2.0, y * std::numbers::sqrt2 / 2.0};
}

double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const auto w = random_words(seed, stream, index);
    return static_cast<double>(w[0] >> 11) * 0x1.0p-53;
}

std::uint64_t stable_hash64(std::uint64_t seed, std::string_view name,
                            std::uint64_t index) {
    constexpr std::uint64_t kOffset = 0xcbf29ce484222325ull;
    constexpr std::uint64_t kPrime = 0x100000001b3ull;
    std::uint64_t h = kOffset;
    const auto mix_byte = [&](std::uint8_t b) {
        h ^= b;
        h *= kPrime;
    };
    for (int i = 0; i < 8; ++i) mix_byte(static_cast<std::uint8_t>(seed >> (8 * i)));
    for (const char ch : name) mix_byte(static_cast<std::uint8_t>(ch));
    for (int i = 0; i < 8; ++i) mix_byte(static_cast<std::uint8_t>(index >> (8 * i)));
    // Final avalanche so that nearby (seed, index) pairs decorrelate.
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    h *= 0xc4ceb9fe1a85ec53ull;
    h ^= h >> 33;
    return h;
}

}  // namespace fieldsim
