#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "beamsim/config.hpp"
#include "beamsim/dataset.hpp"
#include "beamsim/net.hpp"

namespace beamsim {

// Global scalar statistics over every train-split logit, applied before
// temperature scaling.
struct LogitStats {
    double mu_train = 0.0;
    double sigma_train = 1.0;
    double epsilon = 1e-9;
};

// Per-sweep calibrated beam distribution with its diagnostics.
struct CalibratedPrior {
    std::vector<double> pmf;
    double entropy_nats = 0.0;
    double sharpness = 0.0;  // max prob of the unit-temperature softmax
    double T_eff = 1.0;
};

// Shannon entropy in nats, 0*log(0) := 0. The mass must sum to 1 within 1e-9.
double entropy(std::span<const double> pmf);

std::vector<double> standardize_logits(std::span<const double> z, const LogitStats& stats);

// Sharpness- and uncertainty-modulated temperature, clipped to
// [T_min, T_max]: T0 * (s_hat/s_min)^(-alpha_temp) * (1 + gamma * u_norm).
double effective_temperature(double s_hat, double u_norm, const TemperatureConfig& cfg);

// Temperature-scaled softmax of standardized logits plus entropy and
// sharpness. Ranking is invariant in T_eff, so calibration never reorders
// beams.
CalibratedPrior calibrate(std::span<const double> z_std, double T_eff);

struct PriorTrainOptions {
    int epochs = 40;
    double lr = 0.05;
    int batch = 64;
    double label_temp = 1.0;
    std::vector<int> hidden{64, 64};
    std::uint64_t seed = 1;
};

struct PriorModel {
    DenseNet net;
    LogitStats stats;

    void save(std::ostream& out) const;
    static PriorModel load(std::istream& in);
    void save_file(const std::string& path) const;
    static PriorModel load_file(const std::string& path);
};

// Weighted soft-target cross-entropy for one sample; accumulates parameter
// gradients into `grad` when given. Exposed so the finite-difference check
// can probe the exact training loss.
double prior_loss_grad(const DenseNet& net, std::span<const double> x,
                       std::span<const double> soft_target, double class_weight, DenseNet* grad);

// Trains the classifier on sensing features against soft targets derived
// from the per-sweep reward rows, with class weights inversely proportional
// to oracle-label frequency. Returns the model plus global logit statistics.
PriorModel train_prior(const SynthDataset& train, const FeatureStats& feat_stats,
                       const PriorTrainOptions& opt);

// Mean per-epoch training losses from the last train_prior call on this
// thread; kept for convergence monitoring in tests and reports.
const std::vector<double>& last_prior_loss_curve();

}  // namespace beamsim
