#pragma once

#include <array>
#include <cstdint>

#include "beamsim/dataset.hpp"

namespace beamsim {

// Scene description for the synthetic generator. Difficulty is controlled by
// the sensing noise (bearing_noise_sigma) and the gain rolloff
// (beamwidth_sigma); the target bearing drifts on the ring at drift_rate.
struct SceneParams {
    int B = 21;
    int n_sweeps = 1000;
    int samples_per_beam = 256;
    double peak_snr_db = 20.0;
    double beamwidth_sigma = 2.0;       // beams
    double bearing_noise_sigma = 0.8;   // beams
    std::array<bool, 3> modality_mask{{true, true, true}};
    double drift_rate = 0.4;            // beams per sweep
    std::uint64_t seed = 1;

    void validate(bool features_imported = false) const;
};

// Per-modality bearing-noise multipliers: the camera surrogate is the sharp
// sensor, radar the coarse one. Fixed so modality-dropout experiments have a
// dominant modality by construction.
inline constexpr std::array<double, 3> kModalityNoiseScale{{2.5, 1.2, 0.4}};

// Fraction of each recording that carries the pilot; the rest samples the
// noise floor. perc_20 then reads the floor and perc_99.7 the pilot peak,
// which is what makes the percentile-ratio proxy beam-discriminative.
inline constexpr double kPilotDuty = 0.5;

// Builds a full dataset: bearing walk, per-beam power recordings, proxy
// reward rows, oracle labels, and smoothed bearing-histogram features.
// Pure function of params; per-sweep substreams derive from (seed, t).
// keep_iq retains the raw B x N power matrices (memory heavy).
SynthDataset generate(const SceneParams& params, bool keep_iq = false);

// Zeroes the feature segments of disabled modalities and updates the mask
// flags. Reward rows are untouched.
SynthDataset mask_modalities(const SynthDataset& ds, const std::array<bool, 3>& mask);

// Restriction to a uniform-stride subcodebook of B_used beams. Reward rows,
// oracle labels, and recordings are recomputed over the retained beams;
// features keep the original bearing geometry.
SynthDataset subcodebook(const SynthDataset& ds, int B_used);

// Retained 1-based indices for the uniform stride rule.
std::vector<int> subcodebook_indices(int B, int B_used);

// Fraction of sweeps whose summed-histogram argmax bin matches the oracle.
// A model-free ceiling diagnostic of how much the features can say.
double feature_argmax_top1(const SynthDataset& ds);

}  // namespace beamsim
