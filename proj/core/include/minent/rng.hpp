#pragma once

#include <cstdint>
#include <cmath>

namespace minent {

/// splitmix64: tiny deterministic generator. Used everywhere a reproducible
/// stream is needed; per-task streams are derived from a master seed so that
/// parallel sweeps stay bit-stable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard exponential deviate.
    double exponential() {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return -std::log(u);
    }

    /// Standard normal via Box-Muller, one value per call.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Derive an independent stream for subtask `k`.
    static std::uint64_t derive(std::uint64_t master, std::uint64_t k) {
        Rng r(master ^ (0x632be59bd9b4e019ULL * (k + 1)));
        return r.next_u64();
    }

private:
    std::uint64_t state_;
};

} // namespace minent
