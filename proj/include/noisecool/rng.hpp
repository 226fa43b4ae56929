#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, index), so parallel trajectories and reruns are
// reproducible independent of execution order.

namespace noisecool::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive a child seed (trajectory index, noise stream, ...) from a master.
inline std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ (index * 0xd6e8feb86659fd93ULL + 0x2545f4914f6cdd1dULL));
}

/// Uniform in (0, 1]; never returns 0 so log() is safe.
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t h = splitmix64(seed ^ splitmix64(stream ^ splitmix64(index)));
    return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

struct GaussPair {
    double g0;
    double g1;
};

/// Two independent standard normals via Box-Muller; consumes uniform draws
/// 2*index and 2*index+1 of the stream.
inline GaussPair gauss_pair(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    double u1 = uniform(seed, stream, 2 * index);
    double u2 = uniform(seed, stream, 2 * index + 1);
    double r = std::sqrt(-2.0 * std::log(u1));
    double phi = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

} // namespace noisecool::rng
