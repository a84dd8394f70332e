#pragma once

#include <span>
#include <vector>

#include "beamsim/outcome.hpp"

namespace beamsim {

// One sweep's per-beam SNR readings plus the full-codebook maximizer. The
// oracle index exists for labels and Top-k metrics only; online policies
// never see it.
struct RewardRow {
    int t = 0;
    std::vector<double> snr_db;
    int oracle = 0;  // 1-based, argmax of snr_db, lowest index on ties

    static RewardRow from_values(int t, std::vector<double> snr_db);
};

struct HybridTarget {
    std::vector<double> values;  // standardized units
    double alpha_hybrid = 1.0;
};

// Robust absolute-SNR estimate from power samples: the ratio of a high to a
// low percentile of |Z|^2, in dB. An all-zero recording reads as 0 dB rather
// than -inf so that downstream averages stay finite.
double snr_proxy_db(std::span<const double> power_samples, double p_signal = 99.7,
                    double p_noise = 20.0, double epsilon = 1e-12);

// Full-row argmax, 1-based, lowest index on ties.
int oracle_beam(std::span<const double> row);

// Variance-reduced training target: alpha * zscore(iq rewards) +
// (1 - alpha) * zscore(sensing prior mass), entrywise.
HybridTarget hybrid_target(std::span<const double> r_iq, std::span<const double> prior_mass,
                           double alpha_hybrid);

// Offline penalized objective: mean of locked SNR minus probe and outage
// penalties. A reporting tool for comparing finished runs.
double p2_objective(std::span<const SweepOutcome> outcomes, double c_K, double c_out,
                    double theta);

}  // namespace beamsim
