#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace beamsim {

// SplitMix64 stream. All stochastic components take one of these explicitly;
// nothing in the library touches ambient randomness. The generator and the
// distribution transforms below are written out so that runs are
// bit-identical across compilers and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Independent stream derived from (seed, stream). Used to give each
    // sweep / ensemble member / epoch its own substream so that serial and
    // parallel execution orders agree.
    static Rng substream(std::uint64_t seed, std::uint64_t stream) {
        Rng r(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
        r.next_u64();
        return r;
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // (0, 1]; safe as a log() argument
    double uniform01_open() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Inclusive range, multiply-shift mapping.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const auto m = static_cast<unsigned __int128>(next_u64()) * span;
        return lo + static_cast<int>(static_cast<std::uint64_t>(m >> 64));
    }

    // Box-Muller, two uniforms per draw (no cached spare, keeps streams simple).
    double normal(double mean = 0.0, double sd = 1.0) {
        const double u1 = uniform01_open();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sd * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    double exponential(double mean) { return -mean * std::log(uniform01_open()); }

    template <class RandomIt>
    void shuffle(RandomIt first, RandomIt last) {
        const auto n = last - first;
        for (auto i = n - 1; i > 0; --i) {
            const int j = uniform_int(0, static_cast<int>(i));
            std::swap(first[i], first[j]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace beamsim
