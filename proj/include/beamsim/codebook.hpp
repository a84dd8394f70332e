#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace beamsim {

// Beams are abstract directions indexed 1..B on a ring.
struct Codebook {
    int size = 0;

    explicit Codebook(int b) : size(b) {
        if (b < 2) throw std::domain_error("Codebook: size must be >= 2, got " + std::to_string(b));
    }

    bool contains(int beam) const { return beam >= 1 && beam <= size; }
};

// Circular index distance, min(|a-b|, B-|a-b|). Indices are 1-based.
inline int circ_dist(int a, int b, int B) {
    if (B < 2) throw std::domain_error("circ_dist: codebook size must be >= 2");
    if (a < 1 || a > B || b < 1 || b > B)
        throw std::domain_error("circ_dist: beam index out of range [1," + std::to_string(B) + "]");
    const int d = std::abs(a - b);
    return d < B - d ? d : B - d;
}

// Same ring metric for a fractional bearing in [0, B) against beam index a.
inline double circ_dist_real(int a, double bearing, int B) {
    double f = std::abs(static_cast<double>(a - 1) - bearing);
    f = std::fmod(f, static_cast<double>(B));
    return f < B - f ? f : B - f;
}

}  // namespace beamsim
