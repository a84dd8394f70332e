#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beamsim/config.hpp"
#include "beamsim/dataset.hpp"
#include "beamsim/outcome.hpp"
#include "beamsim/prior.hpp"
#include "beamsim/qensemble.hpp"

namespace beamsim {

// One sweep's probing decision and its diagnostics.
struct ProbePlan {
    std::vector<double> scores;  // per beam; empty for baselines without scores
    int K = 0;
    std::vector<int> probe_set;  // ordered by descending score, 1-based
    double entropy_nats = std::numeric_limits<double>::quiet_NaN();
    double gap = std::numeric_limits<double>::quiet_NaN();  // p(1) - p(3)
    int separation_used = 0;  // final min-distance after any relaxation
};

// Memory the safety shield carries between sweeps. Last-known readings come
// from probes only and never expire.
struct ShieldState {
    std::optional<int> prev_lock;
    std::vector<double> last_known_db;  // NaN marks never-probed beams

    explicit ShieldState(int B)
        : last_known_db(B, std::numeric_limits<double>::quiet_NaN()) {}
};

// Measurement channel handed to the lock step. The probe-side callback is
// restricted to the planned set, which is what keeps oracle rewards out of
// reach of the online policy.
using MeasureFn = std::function<double(int beam)>;

// Wraps a raw measurement so any beam outside `allowed` faults.
MeasureFn restrict_to_set(MeasureFn raw, std::vector<int> allowed);

// Probe score: (1 - lambda) * zscore(mu) + lambda * log p + beta * sigma_hat.
std::vector<double> score_beams(const CalibratedPrior& prior, const EnsembleEstimate& est,
                                double lambda, double beta);

// Entropy-driven budget with the near-tie bump: K_min / K_mid / K_max by the
// entropy bands, then +1 (capped) when the top-1/top-3 mass gap is tight.
int adapt_budget(double H, std::span<const double> pmf, const PolicyConfig& cfg);

// Greedy descending-score selection under a minimum circular separation.
// When the constraint cannot fill K beams it is relaxed one step at a time;
// the separation actually used is reported through `separation_used`.
std::vector<int> select_probe_set(std::span<const double> scores, int K, int d_theta, int B,
                                  int* separation_used = nullptr);

// Measures the planned beams, picks the best probed candidate, and applies
// the margin rule: lock it if its SNR clears theta + delta, otherwise fall
// back to the best qualifying neighbor of the previous lock (or retain the
// previous lock). `lock_measure` is consulted once, after the decision, only
// when the locked beam was not probed this sweep.
SweepOutcome probe_and_lock(const ProbePlan& plan, const MeasureFn& probe,
                            const MeasureFn& lock_measure, ShieldState& shield,
                            const PolicyConfig& cfg, int t);

// Everything a learned policy needs at run time.
struct Models {
    PriorModel prior;
    QEnsemble ensemble;
    FeatureStats feat_stats;
};

struct RunOptions {
    int k_fixed = 2;            // budget for fixed-K policies and LinUCB
    double linucb_alpha = 1.0;
    double linucb_ridge = 1.0;
    std::ostream* trace = nullptr;  // per-sweep audit lines when set
};

// Known policy ids: random, prior_argmax, linucb, ours_fixed, ours_adaptive.
bool is_known_policy(const std::string& name);

// Replays a dataset under the named policy. Sequential in t (the shield is a
// dependency chain); independent runs parallelize freely.
std::vector<SweepOutcome> run_policy(const std::string& name, const SynthDataset& test,
                                     const Models* models, const PolicyConfig& cfg,
                                     const TemperatureConfig& tcfg, const RunOptions& opt,
                                     std::uint64_t seed);

}  // namespace beamsim
