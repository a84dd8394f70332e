#include "beamsim/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "beamsim/errors.hpp"
#include "beamsim/measurement.hpp"

namespace beamsim {

using nlohmann::json;

void SweepRecord::validate(int B, double tol_db) const {
    if (!iq_power && !reward_row)
        throw std::domain_error("SweepRecord: need iq_power or reward_row");
    if (iq_power && static_cast<int>(iq_power->size()) != B)
        throw std::domain_error("SweepRecord: iq_power beam count mismatch");
    if (reward_row && static_cast<int>(reward_row->size()) != B)
        throw std::domain_error("SweepRecord: reward_row length mismatch");
    if (iq_power && reward_row) {
        for (int b = 0; b < B; ++b) {
            const double d = snr_proxy_db((*iq_power)[b]);
            if (std::abs(d - (*reward_row)[b]) > tol_db)
                throw std::domain_error("SweepRecord: reward_row disagrees with iq proxy");
        }
    }
    if (oracle_beam) {
        const auto& row = reward_row ? *reward_row : [&] {
            std::vector<double> r(B);
            for (int b = 0; b < B; ++b) r[b] = snr_proxy_db((*iq_power)[b]);
            return r;
        }();
        if (*oracle_beam != beamsim::oracle_beam(row))
            throw std::domain_error("SweepRecord: oracle label is not the row argmax");
    }
}

json FeatureLayout::to_json() const {
    return json{{"bins_per_modality", bins_per_modality},
                {"modalities", {modality_names[0], modality_names[1], modality_names[2]}},
                {"order", "radar | lidar | camera | mask_flags(3)"}};
}

FeatureLayout FeatureLayout::from_json(const json& j) {
    FeatureLayout l;
    l.bins_per_modality = j.at("bins_per_modality").get<int>();
    return l;
}

std::vector<double> FeatureStats::apply(const std::vector<double>& x) const {
    if (x.size() != mean.size())
        throw std::domain_error("FeatureStats: dimension mismatch");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        // constant columns standardize to zero
        out[i] = std[i] < 1e-12 ? 0.0 : (x[i] - mean[i]) / std[i];
    }
    return out;
}

json FeatureStats::to_json() const { return json{{"mean", mean}, {"std", std}}; }

FeatureStats FeatureStats::from_json(const json& j) {
    FeatureStats s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.std = j.at("std").get<std::vector<double>>();
    return s;
}

void SynthDataset::validate() const {
    if (B < 2) throw std::domain_error("SynthDataset: codebook size must be >= 2");
    for (const auto& s : sweeps) s.validate(B);
}

FeatureStats fit_feature_stats(const SynthDataset& ds) {
    if (ds.sweeps.empty()) throw std::domain_error("fit_feature_stats: empty dataset");
    const std::size_t d = ds.sweeps[0].features.size();
    FeatureStats st;
    st.mean.assign(d, 0.0);
    st.std.assign(d, 0.0);
    const double n = static_cast<double>(ds.sweeps.size());
    for (const auto& s : ds.sweeps) {
        if (s.features.size() != d) throw std::domain_error("fit_feature_stats: ragged features");
        for (std::size_t i = 0; i < d; ++i) st.mean[i] += s.features[i];
    }
    for (auto& m : st.mean) m /= n;
    for (const auto& s : ds.sweeps)
        for (std::size_t i = 0; i < d; ++i) {
            const double c = s.features[i] - st.mean[i];
            st.std[i] += c * c;
        }
    for (auto& v : st.std) v = std::sqrt(v / n);
    return st;
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, p);
}

namespace {

double parse_double(std::string_view s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ConfigError("bad numeric field: '" + std::string(s) + "'");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace

void write_reward_csv(const std::string& path, const SynthDataset& ds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << "t";
    for (int b = 1; b <= ds.B; ++b) out << ",beam_" << b;
    out << "\n";
    for (const auto& s : ds.sweeps) {
        if (!s.reward_row) throw std::domain_error("write_reward_csv: sweep lacks reward row");
        out << s.t;
        for (double v : *s.reward_row) out << "," << format_double(v);
        out << "\n";
    }
}

void write_feature_csv(const std::string& path, const SynthDataset& ds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    const int d = ds.feature_dim();
    out << "t";
    for (int i = 1; i <= d; ++i) out << ",f_" << i;
    out << "\n";
    for (const auto& s : ds.sweeps) {
        out << s.t;
        for (double v : s.features) out << "," << format_double(v);
        out << "\n";
    }
}

void write_dataset(const std::string& stem, const SynthDataset& ds) {
    write_reward_csv(stem + ".rewards.csv", ds);
    write_feature_csv(stem + ".features.csv", ds);
    json meta;
    meta["scene"] = ds.scene_meta;
    meta["feature_layout"] = ds.layout.to_json();
    meta["modality_mask"] = ds.modality_mask;
    meta["split"] = ds.split;
    meta["B"] = ds.B;
    if (ds.norm_stats) meta["feature_stats"] = ds.norm_stats->to_json();
    std::ofstream out(stem + ".meta.json", std::ios::binary);
    if (!out) throw ConfigError("cannot write " + stem + ".meta.json");
    out << meta.dump(2) << "\n";
}

SynthDataset import_csv(const std::string& rewards_csv, const std::string& features_csv) {
    std::ifstream rin(rewards_csv);
    if (!rin) throw ConfigError("cannot open " + rewards_csv);
    std::string line;
    if (!std::getline(rin, line)) throw ConfigError("empty rewards csv: " + rewards_csv);
    const auto rhead = split_csv_line(line);
    if (rhead.size() < 3 || rhead[0] != "t" || rhead[1] != "beam_1")
        throw ConfigError("rewards csv header must be t,beam_1,...,beam_B");
    const int B = static_cast<int>(rhead.size()) - 1;

    SynthDataset ds;
    ds.B = B;
    while (std::getline(rin, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != B + 1)
            throw ConfigError("rewards csv row width mismatch");
        SweepRecord s;
        s.t = static_cast<int>(parse_double(cells[0]));
        std::vector<double> row(B);
        for (int b = 0; b < B; ++b) row[b] = parse_double(cells[b + 1]);
        s.oracle_beam = oracle_beam(row);
        s.reward_row = std::move(row);
        ds.sweeps.push_back(std::move(s));
    }

    if (!features_csv.empty()) {
        std::ifstream fin(features_csv);
        if (!fin) throw ConfigError("cannot open " + features_csv);
        if (!std::getline(fin, line)) throw ConfigError("empty features csv: " + features_csv);
        const auto fhead = split_csv_line(line);
        if (fhead.size() < 2 || fhead[0] != "t" || fhead[1] != "f_1")
            throw ConfigError("features csv header must be t,f_1,...,f_D");
        const int D = static_cast<int>(fhead.size()) - 1;
        std::size_t i = 0;
        while (std::getline(fin, line)) {
            if (line.empty()) continue;
            if (i >= ds.sweeps.size()) throw ConfigError("features csv has more rows than rewards");
            const auto cells = split_csv_line(line);
            if (static_cast<int>(cells.size()) != D + 1)
                throw ConfigError("features csv row width mismatch");
            const int t = static_cast<int>(parse_double(cells[0]));
            if (t != ds.sweeps[i].t) throw ConfigError("features csv out of step with rewards");
            ds.sweeps[i].features.resize(D);
            for (int k = 0; k < D; ++k) ds.sweeps[i].features[k] = parse_double(cells[k + 1]);
            ++i;
        }
        if (i != ds.sweeps.size()) throw ConfigError("features csv has fewer rows than rewards");
    }
    ds.scene_meta = json{{"source", "import"}, {"rewards_csv", rewards_csv}};
    return ds;
}

SynthDataset read_dataset(const std::string& stem) {
    SynthDataset ds = import_csv(stem + ".rewards.csv", stem + ".features.csv");
    std::ifstream min(stem + ".meta.json");
    if (!min) throw ConfigError("cannot open " + stem + ".meta.json");
    json meta;
    min >> meta;
    ds.scene_meta = meta.at("scene");
    ds.layout = FeatureLayout::from_json(meta.at("feature_layout"));
    ds.split = meta.at("split").get<std::string>();
    if (meta.contains("modality_mask")) {
        auto m = meta.at("modality_mask").get<std::vector<bool>>();
        for (int i = 0; i < 3; ++i) ds.modality_mask[i] = m[i];
    }
    if (meta.contains("feature_stats"))
        ds.norm_stats = FeatureStats::from_json(meta.at("feature_stats"));
    if (meta.at("B").get<int>() != ds.B)
        throw ConfigError("sidecar B disagrees with rewards csv");
    return ds;
}

}  // namespace beamsim
