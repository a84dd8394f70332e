#include "beamsim/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "beamsim/measurement.hpp"
#include "beamsim/stats.hpp"

namespace beamsim {

using nlohmann::json;

json PolicyMetrics::to_json() const {
    return json{{"policy", policy},           {"top1", top1},
                {"top3", top3},               {"mean_K", mean_K},
                {"outage_rate", outage_rate}, {"shield_rate", shield_rate},
                {"snr_mean_db", snr_mean_db}, {"snr_p05_db", snr_p05_db},
                {"p2", p2}};
}

std::vector<int> top_k_beams(std::span<const double> row, int k) {
    std::vector<int> order(row.size());
    std::iota(order.begin(), order.end(), 1);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return row[a - 1] > row[b - 1]; });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(k)));
    return order;
}

PolicyMetrics compute_metrics(const std::string& policy, std::span<const SweepOutcome> outcomes,
                              const SynthDataset& test, double theta, double c_K, double c_out) {
    if (outcomes.size() != test.sweeps.size())
        throw std::domain_error("compute_metrics: outcome/oracle row count mismatch");
    const double n = static_cast<double>(outcomes.size());
    if (outcomes.empty()) throw std::domain_error("compute_metrics: no outcomes");

    PolicyMetrics m;
    m.policy = policy;
    std::vector<double> locked;
    locked.reserve(outcomes.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        const auto& sweep = test.sweeps[i];
        if (o.t != sweep.t) throw std::domain_error("compute_metrics: outcomes out of step");
        if (!sweep.reward_row || !sweep.oracle_beam)
            throw std::domain_error("compute_metrics: sweep lacks oracle data");
        if (o.b_lock == *sweep.oracle_beam) m.top1 += 1.0;
        const auto top3 = top_k_beams(*sweep.reward_row, 3);
        if (std::find(top3.begin(), top3.end(), o.b_lock) != top3.end()) m.top3 += 1.0;
        m.mean_K += o.K;
        m.outage_rate += o.outage ? 1.0 : 0.0;
        m.shield_rate += o.shield ? 1.0 : 0.0;
        locked.push_back(o.snr_lock_db);
    }
    m.top1 /= n;
    m.top3 /= n;
    m.mean_K /= n;
    m.outage_rate /= n;
    m.shield_rate /= n;
    m.snr_mean_db = mean(locked);
    m.snr_p05_db = percentile(locked, 5.0);
    m.p2 = p2_objective(outcomes, c_K, c_out, theta);
    return m;
}

void snr_cdf_export(std::span<const SweepOutcome> outcomes, std::ostream& out) {
    if (outcomes.empty()) throw std::domain_error("snr_cdf_export: no outcomes");
    std::vector<double> snr;
    snr.reserve(outcomes.size());
    for (const auto& o : outcomes) snr.push_back(o.snr_lock_db);
    std::sort(snr.begin(), snr.end());
    const double n = static_cast<double>(snr.size());
    out << "snr_db,cdf,label\n";
    for (std::size_t i = 0; i < snr.size(); ++i)
        out << format_double(snr[i]) << "," << format_double(static_cast<double>(i + 1) / n)
            << ",\n";
    out << format_double(mean(snr)) << ",,mean\n";
    out << format_double(percentile(snr, 5.0)) << ",,p05\n";
}

std::string metrics_csv_header() {
    return "policy,top1,top3,mean_K,outage_rate,shield_rate,snr_mean_db,snr_p05_db,p2";
}

std::string metrics_csv_row(const PolicyMetrics& m) {
    std::string s = m.policy;
    for (double v : {m.top1, m.top3, m.mean_K, m.outage_rate, m.shield_rate, m.snr_mean_db,
                     m.snr_p05_db, m.p2})
        s += "," + format_double(v);
    return s;
}

}  // namespace beamsim
