#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace beamsim {

// One decision epoch: fused sensing features, the per-beam reward row and/or
// the raw power samples it came from, and the oracle label.
struct SweepRecord {
    int t = 0;
    std::vector<double> features;
    std::optional<std::vector<std::vector<double>>> iq_power;  // B x N, |Z|^2
    std::optional<std::vector<double>> reward_row;             // dB per beam
    std::optional<int> oracle_beam;                            // 1-based

    // Checks the cross-field contract: at least one of iq_power/reward_row,
    // proxy agreement within tol when both exist, oracle = row argmax.
    void validate(int B, double tol_db = 1e-9) const;
};

// Fixed-order concatenation of modality blocks plus the mask flags tail.
struct FeatureLayout {
    int bins_per_modality = 0;
    std::array<std::string, 3> modality_names{{"radar", "lidar", "camera"}};

    int dim() const { return 3 * bins_per_modality + 3; }
    int segment_offset(int m) const { return m * bins_per_modality; }
    int mask_offset() const { return 3 * bins_per_modality; }

    nlohmann::json to_json() const;
    static FeatureLayout from_json(const nlohmann::json& j);
};

// Per-dimension standardization statistics, always fitted on the train split
// and reused verbatim everywhere else.
struct FeatureStats {
    std::vector<double> mean;
    std::vector<double> std;

    std::vector<double> apply(const std::vector<double>& x) const;
    nlohmann::json to_json() const;
    static FeatureStats from_json(const nlohmann::json& j);
};

struct SynthDataset {
    int B = 0;
    std::vector<SweepRecord> sweeps;
    FeatureLayout layout;
    std::array<bool, 3> modality_mask{{true, true, true}};
    std::optional<FeatureStats> norm_stats;  // train-split provenance
    std::string split = "train";
    nlohmann::json scene_meta;  // generation parameters and notes, for the sidecar

    int feature_dim() const { return sweeps.empty() ? 0 : static_cast<int>(sweeps[0].features.size()); }
    void validate() const;
};

FeatureStats fit_feature_stats(const SynthDataset& ds);

// --- disk formats -----------------------------------------------------------
// rewards CSV:  header "t,beam_1,...,beam_B", one row per sweep, dB values
// features CSV: header "t,f_1,...,f_D"
// sidecar JSON: scene parameters, feature layout, standardization statistics

void write_reward_csv(const std::string& path, const SynthDataset& ds);
void write_feature_csv(const std::string& path, const SynthDataset& ds);
void write_dataset(const std::string& stem, const SynthDataset& ds);

// Reads the three files written by write_dataset back into a dataset.
SynthDataset read_dataset(const std::string& stem);

// Import from bare CSVs (no sidecar): rewards required, features optional.
SynthDataset import_csv(const std::string& rewards_csv, const std::string& features_csv);

// Round-trip-exact decimal formatting used by every text emitter.
std::string format_double(double v);

}  // namespace beamsim
