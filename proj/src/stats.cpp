#include "beamsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace beamsim {

std::vector<double> zscore_row(std::span<const double> v, double eps) {
    if (v.size() < 2) throw std::domain_error("zscore_row: need at least 2 entries");
    const double n = static_cast<double>(v.size());
    double m = 0.0;
    for (double x : v) m += x;
    m /= n;
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    const double sd = std::sqrt(var / n);
    std::vector<double> out(v.size(), 0.0);
    if (sd < eps) return out;  // degenerate row rule
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - m) / sd;
    return out;
}

double percentile(std::span<const double> samples, double p) {
    if (samples.empty()) throw std::domain_error("percentile: empty sample set");
    if (!(p >= 0.0 && p <= 100.0))
        throw std::domain_error("percentile: p must lie in [0,100], got " + std::to_string(p));
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    const double h = (static_cast<double>(s.size()) - 1.0) * p / 100.0;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= s.size()) return s.back();
    const double frac = h - static_cast<double>(lo);
    return s[lo] + frac * (s[lo + 1] - s[lo]);
}

double mean(std::span<const double> v) {
    if (v.empty()) throw std::domain_error("mean: empty input");
    double m = 0.0;
    for (double x : v) m += x;
    return m / static_cast<double>(v.size());
}

int argmax_index(std::span<const double> v) {
    if (v.empty()) throw std::domain_error("argmax_index: empty input");
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

std::vector<double> softmax(std::span<const double> v, double temperature) {
    if (v.empty()) throw std::domain_error("softmax: empty input");
    if (!(temperature > 0.0)) throw std::domain_error("softmax: temperature must be positive");
    std::vector<double> y(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) throw std::domain_error("softmax: non-finite logit");
        y[i] = v[i] / temperature;
    }
    const double mx = *std::max_element(y.begin(), y.end());
    double z = 0.0;
    for (double& x : y) {
        x = std::exp(x - mx);
        z += x;
    }
    for (double& x : y) x /= z;
    return y;
}

namespace {

std::vector<double> midranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
        i = j + 1;
    }
    return rank;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::domain_error("spearman: need two equal-length series of size >= 2");
    const auto rx = midranks(x);
    const auto ry = midranks(y);
    const double mx = mean(rx), my = mean(ry);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace beamsim
