#include "beamsim/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "beamsim/codebook.hpp"
#include "beamsim/errors.hpp"
#include "beamsim/linucb.hpp"
#include "beamsim/rng.hpp"
#include "beamsim/stats.hpp"

namespace beamsim {

MeasureFn restrict_to_set(MeasureFn raw, std::vector<int> allowed) {
    return [raw = std::move(raw), allowed = std::move(allowed)](int beam) {
        if (std::find(allowed.begin(), allowed.end(), beam) == allowed.end())
            throw std::logic_error("measurement outside the planned probe set: beam " +
                                   std::to_string(beam));
        return raw(beam);
    };
}

std::vector<double> score_beams(const CalibratedPrior& prior, const EnsembleEstimate& est,
                                double lambda, double beta) {
    const std::size_t B = prior.pmf.size();
    if (est.mu.size() != B || est.sigma_hat.size() != B)
        throw std::domain_error("score_beams: prior/estimate length mismatch");
    const auto zmu = zscore_row(est.mu);
    std::vector<double> s(B);
    for (std::size_t b = 0; b < B; ++b) {
        const double p = std::max(prior.pmf[b], 1e-12);
        if (!(p > 0.0)) throw std::domain_error("score_beams: non-positive prior mass");
        s[b] = (1.0 - lambda) * zmu[b] + lambda * std::log(p) + beta * est.sigma_hat[b];
    }
    return s;
}

int adapt_budget(double H, std::span<const double> pmf, const PolicyConfig& cfg) {
    if (cfg.tau_gap > 0.0 && pmf.size() < 3)
        throw std::domain_error("adapt_budget: top-3 gap undefined for B < 3");
    int K;
    if (H <= cfg.H_low)
        K = cfg.K_min;
    else if (H >= cfg.H_high)
        K = cfg.K_max;
    else
        K = cfg.K_mid;
    if (cfg.tau_gap > 0.0) {
        std::vector<double> top(pmf.begin(), pmf.end());
        std::partial_sort(top.begin(), top.begin() + 3, top.end(), std::greater<double>());
        const double gap = top[0] - top[2];
        if (gap < cfg.tau_gap) K = std::min(K + 1, cfg.K_max);
    }
    return K;
}

std::vector<int> select_probe_set(std::span<const double> scores, int K, int d_theta, int B,
                                  int* separation_used) {
    if (static_cast<int>(scores.size()) != B)
        throw std::domain_error("select_probe_set: score length mismatch");
    if (K < 1 || K > B) throw std::domain_error("select_probe_set: K out of range [1,B]");

    std::vector<int> order(B);
    std::iota(order.begin(), order.end(), 1);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a - 1] > scores[b - 1]; });

    std::vector<int> chosen;
    std::vector<bool> taken(B + 1, false);
    int d = d_theta;
    while (static_cast<int>(chosen.size()) < K) {
        for (int b : order) {
            if (taken[b]) continue;
            bool ok = true;
            for (int c : chosen)
                if (circ_dist(b, c, B) < d) {
                    ok = false;
                    break;
                }
            if (ok) {
                chosen.push_back(b);
                taken[b] = true;
                if (static_cast<int>(chosen.size()) == K) break;
            }
        }
        if (static_cast<int>(chosen.size()) < K) --d;  // constraint infeasible, relax one step
    }
    if (separation_used) *separation_used = d;
    return chosen;
}

SweepOutcome probe_and_lock(const ProbePlan& plan, const MeasureFn& probe,
                            const MeasureFn& lock_measure, ShieldState& shield,
                            const PolicyConfig& cfg, int t) {
    const int B = static_cast<int>(shield.last_known_db.size());
    if (plan.probe_set.empty()) throw std::domain_error("probe_and_lock: empty probe set");
    for (int b : plan.probe_set)
        if (b < 1 || b > B) throw std::domain_error("probe_and_lock: beam outside codebook");

    // Measure the planned set; refresh last-known readings first so the
    // shield judges probed neighbors by what was just seen, not stale values.
    std::vector<double> probed(B, std::numeric_limits<double>::quiet_NaN());
    for (int b : plan.probe_set) {
        probed[b - 1] = probe(b);
        shield.last_known_db[b - 1] = probed[b - 1];
    }

    int b_best = 0;
    for (int b = 1; b <= B; ++b)
        if (!std::isnan(probed[b - 1]) && (b_best == 0 || probed[b - 1] > probed[b_best - 1]))
            b_best = b;

    const double margin = cfg.theta + cfg.delta;
    int b_lock;
    if (probed[b_best - 1] >= margin) {
        b_lock = b_best;
    } else if (!shield.prev_lock) {
        b_lock = b_best;  // cold start: nothing to fall back to
    } else {
        // Highest last-known reading in the neighborhood that clears the
        // margin; unknown beams never qualify. Retain the previous lock when
        // nothing qualifies.
        const int prev = *shield.prev_lock;
        int pick = 0;
        for (int b = 1; b <= B; ++b) {
            if (circ_dist(b, prev, B) > cfg.w) continue;
            const double v = shield.last_known_db[b - 1];
            if (std::isnan(v) || v < margin) continue;
            if (pick == 0 || v > shield.last_known_db[pick - 1]) pick = b;
        }
        b_lock = pick != 0 ? pick : prev;
    }

    SweepOutcome out;
    out.t = t;
    out.b_best = b_best;
    out.b_lock = b_lock;
    out.K = static_cast<int>(plan.probe_set.size());
    out.shield = b_lock != b_best;
    out.snr_lock_db = !std::isnan(probed[b_lock - 1]) ? probed[b_lock - 1] : lock_measure(b_lock);
    out.outage = out.snr_lock_db < cfg.theta;
    shield.prev_lock = b_lock;
    return out;
}

bool is_known_policy(const std::string& name) {
    return name == "random" || name == "prior_argmax" || name == "linucb" ||
           name == "ours_fixed" || name == "ours_adaptive";
}

namespace {

void write_trace(std::ostream* trace, const std::string& policy, const ProbePlan& plan,
                 const SweepOutcome& o) {
    if (!trace) return;
    (*trace) << "policy=" << policy << " t=" << o.t << " K=" << o.K << " S=";
    for (std::size_t i = 0; i < plan.probe_set.size(); ++i)
        (*trace) << (i ? "|" : "") << plan.probe_set[i];
    (*trace) << " H=" << (std::isnan(plan.entropy_nats) ? "-" : format_double(plan.entropy_nats))
             << " g=" << (std::isnan(plan.gap) ? "-" : format_double(plan.gap))
             << " sep=" << plan.separation_used << " best=" << o.b_best << " lock=" << o.b_lock
             << " snr=" << format_double(o.snr_lock_db) << " shield=" << (o.shield ? 1 : 0)
             << " out=" << (o.outage ? 1 : 0) << "\n";
}

double top_gap(const std::vector<double>& pmf) {
    if (pmf.size() < 3) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> top(pmf.begin(), pmf.end());
    std::partial_sort(top.begin(), top.begin() + 3, top.end(), std::greater<double>());
    return top[0] - top[2];
}

}  // namespace

std::vector<SweepOutcome> run_policy(const std::string& name, const SynthDataset& test,
                                     const Models* models, const PolicyConfig& cfg,
                                     const TemperatureConfig& tcfg, const RunOptions& opt,
                                     std::uint64_t seed) {
    if (!is_known_policy(name)) throw ConfigError("unknown policy id: " + name);
    const bool needs_prior = name == "prior_argmax" || name == "ours_fixed" || name == "ours_adaptive";
    const bool needs_ensemble = name == "ours_fixed" || name == "ours_adaptive";
    if ((needs_prior || needs_ensemble) && models == nullptr)
        throw ConfigError("policy '" + name + "' requires trained models");

    const int B = test.B;
    const bool needs_features = name != "random";
    const FeatureStats* fstats = nullptr;
    if (needs_features) {
        if (test.norm_stats)
            fstats = &*test.norm_stats;
        else if (models)
            fstats = &models->feat_stats;
        else
            throw ConfigError("policy '" + name + "' needs feature statistics on the dataset");
    }

    ShieldState shield(B);
    Rng pick = Rng::substream(seed, 0x52414E44);  // random-policy draws
    std::optional<LinUcb> ucb;
    if (name == "linucb")
        ucb.emplace(B, test.feature_dim(), opt.linucb_alpha, opt.linucb_ridge);

    std::vector<SweepOutcome> outcomes;
    outcomes.reserve(test.sweeps.size());

    for (const auto& sweep : test.sweeps) {
        if (!sweep.reward_row) throw ConfigError("run_policy: sweep lacks a reward row");
        const auto& row = *sweep.reward_row;

        ProbePlan plan;
        std::vector<double> x_std;
        if (needs_features) x_std = fstats->apply(sweep.features);

        if (name == "random") {
            plan.K = 1;
            plan.probe_set = {pick.uniform_int(1, B)};
        } else if (name == "prior_argmax") {
            // argmax of the calibrated pmf equals the logit argmax for every
            // temperature, so the pmf itself is not needed here.
            const auto logits = models->prior.net.forward(x_std);
            plan.K = 1;
            plan.probe_set = {argmax_index(logits) + 1};
        } else if (name == "linucb") {
            const auto s = ucb->scores(x_std);
            plan.K = std::min(opt.k_fixed, B);
            plan.scores = s;
            plan.probe_set = select_probe_set(s, plan.K, 0, B);
        } else {
            const auto logits = models->prior.net.forward(x_std);
            const auto z_std = standardize_logits(logits, models->prior.stats);
            const auto est = models->ensemble.estimate(x_std, cfg.epsilon);
            const double u_norm = mean(est.sigma_hat);
            const auto unit = softmax(z_std, 1.0);
            const double s_hat = *std::max_element(unit.begin(), unit.end());
            const double t_eff = effective_temperature(s_hat, u_norm, tcfg);
            const CalibratedPrior prior = calibrate(z_std, t_eff);

            plan.scores = score_beams(prior, est, cfg.lambda, cfg.beta);
            plan.entropy_nats = prior.entropy_nats;
            plan.gap = top_gap(prior.pmf);
            plan.K = name == "ours_fixed" ? std::min(opt.k_fixed, B)
                                          : adapt_budget(prior.entropy_nats, prior.pmf, cfg);
            plan.probe_set = select_probe_set(plan.scores, plan.K, cfg.d_theta, B,
                                              &plan.separation_used);
        }

        const MeasureFn raw = [&row](int b) { return row[b - 1]; };
        const MeasureFn probe = restrict_to_set(raw, plan.probe_set);
        auto outcome = probe_and_lock(plan, probe, raw, shield, cfg, sweep.t);

        if (name == "linucb")
            for (int b : plan.probe_set) ucb->update(b - 1, x_std, row[b - 1]);

        write_trace(opt.trace, name, plan, outcome);
        outcomes.push_back(outcome);
    }
    return outcomes;
}

}  // namespace beamsim
