#pragma once

#include <span>
#include <vector>

namespace beamsim {

// Per-row standardization: mean 0, population std 1. Rows with std below eps
// carry no ranking information and map to all zeros.
std::vector<double> zscore_row(std::span<const double> v, double eps = 1e-12);

// Linear-interpolation percentile on sorted order statistics, rank position
// (n-1)*p/100. p=0 gives the min, p=100 the max.
double percentile(std::span<const double> samples, double p);

double mean(std::span<const double> v);

// Lowest index wins ties; returns 0-based position.
int argmax_index(std::span<const double> v);

// Numerically stable softmax of v / temperature.
std::vector<double> softmax(std::span<const double> v, double temperature = 1.0);

// Spearman rank correlation (midranks for ties).
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace beamsim
