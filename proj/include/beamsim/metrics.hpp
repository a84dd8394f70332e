#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "beamsim/dataset.hpp"
#include "beamsim/outcome.hpp"

namespace beamsim {

// One policy's scoreboard over a replayed dataset.
struct PolicyMetrics {
    std::string policy;
    double top1 = 0.0;
    double top3 = 0.0;
    double mean_K = 0.0;
    double outage_rate = 0.0;
    double shield_rate = 0.0;
    double snr_mean_db = 0.0;
    double snr_p05_db = 0.0;
    double p2 = 0.0;

    nlohmann::json to_json() const;
};

// Counts locked-beam hits against the oracle rows of `test`, aligned by t.
// Top-3 membership uses the three best oracle beams, lowest index breaking
// the rank-3 tie. p2 uses the penalized offline objective.
PolicyMetrics compute_metrics(const std::string& policy, std::span<const SweepOutcome> outcomes,
                              const SynthDataset& test, double theta, double c_K, double c_out);

// The top-k oracle beams of a reward row (value descending, index ascending).
std::vector<int> top_k_beams(std::span<const double> row, int k);

// Empirical CDF of locked SNR: "snr_db,cdf,label" rows, points first, then
// mean and p05 marker rows.
void snr_cdf_export(std::span<const SweepOutcome> outcomes, std::ostream& out);

std::string metrics_csv_header();
std::string metrics_csv_row(const PolicyMetrics& m);

}  // namespace beamsim
