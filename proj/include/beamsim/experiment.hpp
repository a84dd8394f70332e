#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "beamsim/config.hpp"
#include "beamsim/metrics.hpp"
#include "beamsim/policy.hpp"
#include "beamsim/synth.hpp"

namespace beamsim {

// Fully parsed experiment description: scheduler parameters, dataset source,
// training hyperparameters, and the run plan.
struct ExperimentSetup {
    PolicyConfig policy;
    TemperatureConfig temperature;

    bool use_import = false;
    SceneParams scene;  // n_sweeps unused; the split sizes below rule
    int n_train = 3000;
    int n_test = 2000;
    std::string train_rewards_csv, train_features_csv;
    std::string test_rewards_csv, test_features_csv;

    PriorTrainOptions prior_opt;
    EnsembleTrainOptions ens_opt;

    std::vector<std::string> policies{"random", "prior_argmax", "linucb", "ours_fixed",
                                      "ours_adaptive"};
    std::vector<std::uint64_t> seeds{1};
    int k_fixed = 2;
    double linucb_alpha = 1.0;
    double linucb_ridge = 1.0;
    std::string out_dir = "out";
    bool trace = false;
    std::string prior_checkpoint;     // load instead of training when set
    std::string ensemble_checkpoint;

    nlohmann::json raw;
};

ExperimentSetup parse_experiment(const nlohmann::json& cfg);

struct DatasetPair {
    SynthDataset train;
    SynthDataset test;
};

// Generates (or imports) both splits and pins the train-split feature
// statistics on each. The dataset depends only on the scene, never on the
// run seed.
DatasetPair build_datasets(const ExperimentSetup& s);

// Trains (or loads) the prior and the ensemble for one run seed.
Models train_models(const DatasetPair& data, const ExperimentSetup& s, std::uint64_t seed);

// Full pipeline for every (seed, policy) pair. Writes per-seed reports, CSV
// sidecars, optional traces, and a manifest under out_dir; returns the
// aggregate report document.
nlohmann::json run_experiment(const nlohmann::json& cfg);

// Score-term switches plus modality-dropout rows, all at fixed K. Models are
// retrained per modality subset so each row measures the information the
// remaining sensors carry.
nlohmann::json run_ablation(const nlohmann::json& cfg);

// Uniform subcodebook sweep; models retrained per codebook size.
nlohmann::json run_codebook_sweep(const nlohmann::json& cfg);

// Writes a dataset to out_dir (generate subcommand).
nlohmann::json run_generate(const nlohmann::json& cfg);

// Trains and checkpoints models (train subcommand).
nlohmann::json run_train(const nlohmann::json& cfg);

// FNV-1a 64-bit digest, hex-encoded. Used for config/dataset provenance.
std::string fnv1a64_hex(std::string_view bytes);
std::string dataset_digest(const SynthDataset& ds);

}  // namespace beamsim
