#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "beamsim/dataset.hpp"
#include "beamsim/net.hpp"
#include "beamsim/prior.hpp"

namespace beamsim {

// Per-beam prediction summary across ensemble members.
struct EnsembleEstimate {
    std::vector<double> mu;         // member mean, standardized reward units
    std::vector<double> tau;        // population std across members
    std::vector<double> sigma_hat;  // tau / (max tau + eps), in [0,1]
};

struct EnsembleTrainOptions {
    int members = 5;
    int epochs = 30;
    double lr = 0.02;
    int batch = 64;
    std::vector<int> hidden{64, 64};
    std::uint64_t seed = 1;
};

// Bootstrap-diversified ensemble of reward regressors. Each member maps the
// feature vector to all B per-beam predictions in one pass, so a sweep costs
// exactly M forward passes.
class QEnsemble {
public:
    QEnsemble() = default;
    explicit QEnsemble(std::vector<DenseNet> members);

    int size() const { return static_cast<int>(members_.size()); }
    const DenseNet& member(int m) const { return members_[m]; }

    EnsembleEstimate estimate(std::span<const double> x, double epsilon = 1e-12) const;

    std::uint64_t forward_count() const;
    void reset_forward_count() const;

    // Container checkpoint: member count, seeds, hybrid blend, member blocks.
    void save(std::ostream& out) const;
    static QEnsemble load(std::istream& in);
    void save_file(const std::string& path) const;
    static QEnsemble load_file(const std::string& path);

    std::vector<std::uint64_t> member_seeds;  // recorded for provenance
    double alpha_hybrid_used = 1.0;

private:
    std::vector<DenseNet> members_;
};

// Squared-error regression loss for one sample, halved so the output
// gradient is simply (prediction - target). Accumulates into `grad` if given.
double qmember_loss_grad(const DenseNet& net, std::span<const double> x,
                         std::span<const double> target, DenseNet* grad);

// Each member fits hybrid targets (IQ rewards blended with the sensing
// prior) by SGD on its own bootstrap resample with its own init seed.
QEnsemble train_ensemble(const SynthDataset& train, const FeatureStats& feat_stats,
                         const PriorModel& prior, double alpha_hybrid,
                         const EnsembleTrainOptions& opt);

// Mean per-epoch losses of each member from the last train_ensemble call.
const std::vector<std::vector<double>>& last_ensemble_loss_curves();

}  // namespace beamsim
