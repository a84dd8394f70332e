#include "beamsim/measurement.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

#include "beamsim/stats.hpp"

namespace beamsim {

RewardRow RewardRow::from_values(int t, std::vector<double> snr_db) {
    for (double v : snr_db)
        if (!std::isfinite(v)) throw std::domain_error("RewardRow: non-finite SNR entry");
    RewardRow r;
    r.t = t;
    r.oracle = oracle_beam(snr_db);
    r.snr_db = std::move(snr_db);
    return r;
}

double snr_proxy_db(std::span<const double> power_samples, double p_signal, double p_noise,
                    double epsilon) {
    if (power_samples.empty()) throw std::domain_error("snr_proxy_db: empty sample set");
    if (!(p_signal > p_noise))
        throw std::domain_error("snr_proxy_db: signal percentile must exceed noise percentile");
    const double ps = percentile(power_samples, p_signal);
    const double pn = percentile(power_samples, p_noise);
    if (ps <= 0.0) {
        // 0/(0+eps) convention: a dead recording reads as 0 dB.
        std::cerr << "[beamsim] warning: all-zero power recording, reporting 0 dB\n";
        return 0.0;
    }
    return 10.0 * std::log10(ps / (pn + epsilon));
}

int oracle_beam(std::span<const double> row) {
    if (row.empty()) throw std::domain_error("oracle_beam: empty row");
    for (double v : row)
        if (!std::isfinite(v)) throw std::domain_error("oracle_beam: non-finite entry");
    return argmax_index(row) + 1;
}

HybridTarget hybrid_target(std::span<const double> r_iq, std::span<const double> prior_mass,
                           double alpha_hybrid) {
    if (r_iq.size() != prior_mass.size())
        throw std::domain_error("hybrid_target: length mismatch");
    if (!(alpha_hybrid >= 0.0 && alpha_hybrid <= 1.0))
        throw std::domain_error("hybrid_target: alpha must lie in [0,1]");
    double mass = 0.0;
    for (double p : prior_mass) mass += p;
    if (std::abs(mass - 1.0) > 1e-9)
        throw std::domain_error("hybrid_target: prior mass must sum to 1, got " +
                                std::to_string(mass));
    const auto zi = zscore_row(r_iq);
    const auto zp = zscore_row(prior_mass);
    HybridTarget h;
    h.alpha_hybrid = alpha_hybrid;
    h.values.resize(r_iq.size());
    for (std::size_t i = 0; i < r_iq.size(); ++i)
        h.values[i] = alpha_hybrid * zi[i] + (1.0 - alpha_hybrid) * zp[i];
    return h;
}

double p2_objective(std::span<const SweepOutcome> outcomes, double c_K, double c_out,
                    double theta) {
    if (outcomes.empty()) throw std::domain_error("p2_objective: no outcomes");
    double acc = 0.0;
    for (const auto& o : outcomes) {
        acc += o.snr_lock_db - c_K * static_cast<double>(o.K) -
               c_out * (o.snr_lock_db < theta ? 1.0 : 0.0);
    }
    return acc / static_cast<double>(outcomes.size());
}

}  // namespace beamsim
