#pragma once

#include <cmath>
#include <cstdint>

namespace tgf {

// Counter-based random streams. Every random quantity in the project is a
// pure function of a 64-bit key, so results are reproducible bit-for-bit
// regardless of evaluation order or thread scheduling.
namespace rng {

inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t hash2(std::uint64_t a, std::uint64_t b) {
    return mix(mix(a) ^ b);
}

inline std::uint64_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix(hash2(a, b) ^ c);
}

inline std::uint64_t hash4(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    return mix(hash3(a, b, c) ^ d);
}

inline std::uint64_t hash5(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d,
                           std::uint64_t e) {
    return mix(hash4(a, b, c, d) ^ e);
}

// uniform in (0,1]; never returns 0 so log() below is safe
inline double to_unit(std::uint64_t x) {
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

// Box-Muller pair of independent standard normals for counter i of stream key.
inline void gaussian_pair(std::uint64_t key, std::uint64_t i, double& z0, double& z1) {
    const double u1 = to_unit(mix(key + 2 * i));
    const double u2 = to_unit(mix(key + 2 * i + 1));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 6.283185307179586476925286766559 * u2;
    z0 = r * std::cos(th);
    z1 = r * std::sin(th);
}

// stream tags keeping unrelated draws on disjoint keys
enum class Stream : std::uint64_t {
    FieldGen = 0x11,
    WienerIncrement = 0x22,
    OuAux = 0x33,
    OuInit = 0x44,
    InitialCondition = 0x55,
    MdTrial = 0x66,
};

inline std::uint64_t stream_key(std::uint64_t seed, Stream s, std::uint64_t a = 0,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
    return hash5(seed, static_cast<std::uint64_t>(s), a, b, c);
}

}  // namespace rng
}  // namespace tgf
