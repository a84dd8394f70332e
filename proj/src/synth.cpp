#include "beamsim/synth.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "beamsim/codebook.hpp"
#include "beamsim/errors.hpp"
#include "beamsim/measurement.hpp"
#include "beamsim/rng.hpp"
#include "beamsim/stats.hpp"

namespace beamsim {

using nlohmann::json;

void SceneParams::validate(bool features_imported) const {
    auto fail = [](const std::string& m) { throw ConfigError("scene: " + m); };
    if (B < 2) fail("B must be >= 2");
    if (n_sweeps < 1) fail("n_sweeps must be >= 1");
    if (samples_per_beam < 4) fail("samples_per_beam must be >= 4");
    if (!(beamwidth_sigma > 0.0)) fail("beamwidth_sigma must be positive");
    if (bearing_noise_sigma < 0.0) fail("bearing_noise_sigma must be >= 0");
    if (drift_rate < 0.0) fail("drift_rate must be >= 0");
    if (!features_imported && !modality_mask[0] && !modality_mask[1] && !modality_mask[2])
        fail("modality_mask cannot be all false");
}

namespace {

constexpr double kNoiseFloorLinear = 1.0;  // 0 dB reference
constexpr double kHistSmoothSigma = 1.0;   // bins

double wrap_bearing(double r, int B) {
    r = std::fmod(r, static_cast<double>(B));
    if (r < 0.0) r += static_cast<double>(B);
    return r;
}

// Smoothed one-hot histogram over the B bins, unit mass.
void fill_histogram(std::vector<double>& features, int offset, int B, double bearing) {
    double total = 0.0;
    for (int b = 1; b <= B; ++b) {
        const double d = circ_dist_real(b, bearing, B);
        const double v = std::exp(-d * d / (2.0 * kHistSmoothSigma * kHistSmoothSigma));
        features[offset + b - 1] = v;
        total += v;
    }
    for (int b = 0; b < B; ++b) features[offset + b] /= total;
}

json scene_to_json(const SceneParams& p) {
    return json{{"B", p.B},
                {"n_sweeps", p.n_sweeps},
                {"samples_per_beam", p.samples_per_beam},
                {"peak_snr_db", p.peak_snr_db},
                {"beamwidth_sigma", p.beamwidth_sigma},
                {"bearing_noise_sigma", p.bearing_noise_sigma},
                {"modality_mask", p.modality_mask},
                {"drift_rate", p.drift_rate},
                {"seed", p.seed},
                {"pilot_duty", kPilotDuty},
                {"modality_noise_scale", kModalityNoiseScale},
                {"noise_floor_db", 0.0},
                {"notes", "meta features omitted; histogram features only"}};
}

}  // namespace

SynthDataset generate(const SceneParams& params, bool keep_iq) {
    params.validate();
    const int B = params.B;
    const int N = params.samples_per_beam;
    const double peak = std::pow(10.0, params.peak_snr_db / 10.0);
    const int n_on = static_cast<int>(std::lround(kPilotDuty * N));

    SynthDataset ds;
    ds.B = B;
    ds.layout.bins_per_modality = B;
    ds.modality_mask = params.modality_mask;
    ds.scene_meta = scene_to_json(params);
    ds.sweeps.reserve(params.n_sweeps);

    // Bearing walk first: steps come from per-sweep substreams, accumulation
    // is a cheap serial scan, so the heavy per-sweep work below could run in
    // parallel without changing a single draw.
    std::vector<double> bearing(params.n_sweeps);
    double r = wrap_bearing(Rng::substream(params.seed, 0x0FF5E7).uniform01() * B, B);
    for (int t = 0; t < params.n_sweeps; ++t) {
        Rng walk = Rng::substream(params.seed, 4ull * t);
        r = wrap_bearing(r + walk.normal(0.0, params.drift_rate), B);
        bearing[t] = r;
    }

    for (int t = 0; t < params.n_sweeps; ++t) {
        SweepRecord rec;
        rec.t = t;

        // Sensing features: per-modality noisy bearing, smoothed into B bins.
        Rng feat = Rng::substream(params.seed, 4ull * t + 1);
        rec.features.assign(ds.layout.dim(), 0.0);
        for (int m = 0; m < 3; ++m) {
            const double noisy = wrap_bearing(
                bearing[t] + feat.normal(0.0, params.bearing_noise_sigma * kModalityNoiseScale[m]),
                B);
            if (params.modality_mask[m])
                fill_histogram(rec.features, ds.layout.segment_offset(m), B, noisy);
            rec.features[ds.layout.mask_offset() + m] = params.modality_mask[m] ? 1.0 : 0.0;
        }

        // Per-beam recordings: duty-cycled pilot over a flat noise floor.
        Rng iq = Rng::substream(params.seed, 4ull * t + 2);
        std::vector<double> row(B);
        std::vector<std::vector<double>> power;
        if (keep_iq) power.resize(B);
        std::vector<double> samples(N);
        for (int b = 1; b <= B; ++b) {
            const double d = circ_dist_real(b, bearing[t], B);
            const double sig =
                peak * std::exp(-d * d / (2.0 * params.beamwidth_sigma * params.beamwidth_sigma));
            for (int i = 0; i < N; ++i) {
                const double m = i < n_on ? kNoiseFloorLinear + sig : kNoiseFloorLinear;
                samples[i] = iq.exponential(m);
            }
            row[b - 1] = snr_proxy_db(samples);
            if (keep_iq) power[b - 1] = samples;
        }
        rec.oracle_beam = oracle_beam(row);
        rec.reward_row = std::move(row);
        if (keep_iq) rec.iq_power = std::move(power);
        ds.sweeps.push_back(std::move(rec));
    }
    return ds;
}

SynthDataset mask_modalities(const SynthDataset& ds, const std::array<bool, 3>& mask) {
    if (!mask[0] && !mask[1] && !mask[2])
        throw std::domain_error("mask_modalities: cannot disable every modality");
    if (ds.layout.bins_per_modality <= 0)
        throw std::domain_error("mask_modalities: dataset has no modality layout");
    SynthDataset out = ds;
    out.modality_mask = mask;
    for (auto& s : out.sweeps) {
        if (static_cast<int>(s.features.size()) != ds.layout.dim())
            throw std::domain_error("mask_modalities: feature width does not match layout");
        for (int m = 0; m < 3; ++m) {
            if (!mask[m]) {
                const int off = ds.layout.segment_offset(m);
                for (int i = 0; i < ds.layout.bins_per_modality; ++i) s.features[off + i] = 0.0;
            }
            s.features[ds.layout.mask_offset() + m] = mask[m] ? 1.0 : 0.0;
        }
    }
    out.scene_meta["modality_mask"] = mask;
    return out;
}

std::vector<int> subcodebook_indices(int B, int B_used) {
    if (B_used < 2) throw std::domain_error("subcodebook: B_used must be >= 2");
    if (B_used > B) throw std::domain_error("subcodebook: B_used exceeds codebook size");
    std::vector<int> idx(B_used);
    for (int k = 0; k < B_used; ++k)
        idx[k] = static_cast<int>(
            std::llround(1.0 + static_cast<double>(k) * (B - 1) / (B_used - 1.0)));
    return idx;
}

SynthDataset subcodebook(const SynthDataset& ds, int B_used) {
    const auto keep = subcodebook_indices(ds.B, B_used);
    SynthDataset out = ds;
    out.B = B_used;
    for (auto& s : out.sweeps) {
        if (s.reward_row) {
            std::vector<double> row(B_used);
            for (int k = 0; k < B_used; ++k) row[k] = (*s.reward_row)[keep[k] - 1];
            s.oracle_beam = oracle_beam(row);
            s.reward_row = std::move(row);
        }
        if (s.iq_power) {
            std::vector<std::vector<double>> p(B_used);
            for (int k = 0; k < B_used; ++k) p[k] = (*s.iq_power)[keep[k] - 1];
            s.iq_power = std::move(p);
        }
    }
    out.scene_meta["subcodebook_of"] = ds.B;
    out.scene_meta["retained_beams"] = keep;
    return out;
}

double feature_argmax_top1(const SynthDataset& ds) {
    if (ds.sweeps.empty()) throw std::domain_error("feature_argmax_top1: empty dataset");
    const int B = ds.layout.bins_per_modality;
    int hits = 0;
    std::vector<double> bins(B);
    for (const auto& s : ds.sweeps) {
        std::fill(bins.begin(), bins.end(), 0.0);
        for (int m = 0; m < 3; ++m) {
            const int off = ds.layout.segment_offset(m);
            for (int b = 0; b < B; ++b) bins[b] += s.features[off + b];
        }
        if (!s.oracle_beam) throw std::domain_error("feature_argmax_top1: missing oracle label");
        if (argmax_index(bins) + 1 == *s.oracle_beam) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(ds.sweeps.size());
}

}  // namespace beamsim
