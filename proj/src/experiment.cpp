#include "beamsim/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "beamsim/errors.hpp"
#include "beamsim/rng.hpp"

namespace beamsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Tags an exception with the pipeline stage it came from.
template <class Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw std::runtime_error("[stage: " + std::string(name) + "] " + e.what());
    }
}

template <class T>
void read_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
        }
    }
}

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << body;
}

}  // namespace

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    static const char* hexd = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hexd[h & 0xF];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

std::string dataset_digest(const SynthDataset& ds) {
    std::string acc;
    acc.reserve(ds.sweeps.size() * 64);
    for (const auto& s : ds.sweeps) {
        acc += std::to_string(s.t);
        if (s.reward_row)
            for (double v : *s.reward_row) acc += "," + format_double(v);
        acc += ";";
        for (double v : s.features) acc += "," + format_double(v);
        acc += "\n";
    }
    return fnv1a64_hex(acc);
}

ExperimentSetup parse_experiment(const json& cfg) {
    ExperimentSetup s;
    s.raw = cfg;
    if (cfg.contains("policy")) s.policy = policy_config_from_json(cfg.at("policy"));
    if (cfg.contains("temperature"))
        s.temperature = temperature_config_from_json(cfg.at("temperature"));

    if (cfg.contains("import") && cfg.contains("scene"))
        throw ConfigError("config: give either 'scene' or 'import', not both");

    if (cfg.contains("import")) {
        const auto& j = cfg.at("import");
        reject_unknown_keys(j,
                            {"train_rewards_csv", "train_features_csv", "test_rewards_csv",
                             "test_features_csv"},
                            "import");
        s.use_import = true;
        read_field(j, "train_rewards_csv", s.train_rewards_csv);
        read_field(j, "train_features_csv", s.train_features_csv);
        read_field(j, "test_rewards_csv", s.test_rewards_csv);
        read_field(j, "test_features_csv", s.test_features_csv);
        if (s.train_rewards_csv.empty() || s.test_rewards_csv.empty())
            throw ConfigError("import: train and test reward CSVs are required");
    } else if (cfg.contains("scene")) {
        const auto& j = cfg.at("scene");
        reject_unknown_keys(j,
                            {"B", "n_train", "n_test", "samples_per_beam", "peak_snr_db",
                             "beamwidth_sigma", "bearing_noise_sigma", "modality_mask",
                             "drift_rate", "seed"},
                            "scene");
        read_field(j, "B", s.scene.B);
        read_field(j, "n_train", s.n_train);
        read_field(j, "n_test", s.n_test);
        read_field(j, "samples_per_beam", s.scene.samples_per_beam);
        read_field(j, "peak_snr_db", s.scene.peak_snr_db);
        read_field(j, "beamwidth_sigma", s.scene.beamwidth_sigma);
        read_field(j, "bearing_noise_sigma", s.scene.bearing_noise_sigma);
        read_field(j, "drift_rate", s.scene.drift_rate);
        read_field(j, "seed", s.scene.seed);
        if (j.contains("modality_mask")) {
            const auto m = j.at("modality_mask").get<std::vector<bool>>();
            if (m.size() != 3) throw ConfigError("scene: modality_mask needs 3 entries");
            for (int i = 0; i < 3; ++i) s.scene.modality_mask[i] = m[i];
        }
    }

    if (cfg.contains("training")) {
        const auto& j = cfg.at("training");
        reject_unknown_keys(j,
                            {"prior_epochs", "prior_lr", "prior_batch", "label_temp",
                             "prior_hidden", "ensemble_members", "ensemble_epochs", "ensemble_lr",
                             "ensemble_batch", "ensemble_hidden"},
                            "training");
        read_field(j, "prior_epochs", s.prior_opt.epochs);
        read_field(j, "prior_lr", s.prior_opt.lr);
        read_field(j, "prior_batch", s.prior_opt.batch);
        read_field(j, "label_temp", s.prior_opt.label_temp);
        read_field(j, "prior_hidden", s.prior_opt.hidden);
        read_field(j, "ensemble_members", s.ens_opt.members);
        read_field(j, "ensemble_epochs", s.ens_opt.epochs);
        read_field(j, "ensemble_lr", s.ens_opt.lr);
        read_field(j, "ensemble_batch", s.ens_opt.batch);
        read_field(j, "ensemble_hidden", s.ens_opt.hidden);
    }

    if (cfg.contains("run")) {
        const auto& j = cfg.at("run");
        reject_unknown_keys(j,
                            {"policies", "seed", "seeds", "k_fixed", "linucb_alpha",
                             "linucb_ridge", "out", "trace", "prior_checkpoint",
                             "ensemble_checkpoint", "codebook_sizes"},
                            "run");
        read_field(j, "policies", s.policies);
        if (j.contains("seeds"))
            s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        else if (j.contains("seed"))
            s.seeds = {j.at("seed").get<std::uint64_t>()};
        read_field(j, "k_fixed", s.k_fixed);
        read_field(j, "linucb_alpha", s.linucb_alpha);
        read_field(j, "linucb_ridge", s.linucb_ridge);
        read_field(j, "out", s.out_dir);
        read_field(j, "trace", s.trace);
        read_field(j, "prior_checkpoint", s.prior_checkpoint);
        read_field(j, "ensemble_checkpoint", s.ensemble_checkpoint);
    }
    for (const auto& p : s.policies)
        if (!is_known_policy(p)) throw ConfigError("unknown policy id: " + p);
    if (s.seeds.empty()) throw ConfigError("run: need at least one seed");
    return s;
}

DatasetPair build_datasets(const ExperimentSetup& s) {
    return stage("dataset", [&] {
        DatasetPair d;
        if (s.use_import) {
            d.train = import_csv(s.train_rewards_csv, s.train_features_csv);
            d.test = import_csv(s.test_rewards_csv, s.test_features_csv);
            d.train.split = "train";
            d.test.split = "test";
            if (d.train.B != d.test.B) throw ConfigError("import: split codebook sizes differ");
        } else {
            SceneParams train_scene = s.scene;
            train_scene.n_sweeps = s.n_train;
            train_scene.seed = Rng::substream(s.scene.seed, 1).next_u64();
            SceneParams test_scene = s.scene;
            test_scene.n_sweeps = s.n_test;
            test_scene.seed = Rng::substream(s.scene.seed, 2).next_u64();
            d.train = generate(train_scene);
            d.test = generate(test_scene);
            d.train.split = "train";
            d.test.split = "test";
        }
        // Standardization provenance: fit on train, reuse verbatim on test.
        const auto stats = fit_feature_stats(d.train);
        d.train.norm_stats = stats;
        d.test.norm_stats = stats;
        return d;
    });
}

Models train_models(const DatasetPair& data, const ExperimentSetup& s, std::uint64_t seed) {
    Models m;
    m.feat_stats = *data.train.norm_stats;
    if (!s.prior_checkpoint.empty()) {
        m.prior = stage("load-prior", [&] { return PriorModel::load_file(s.prior_checkpoint); });
    } else {
        PriorTrainOptions popt = s.prior_opt;
        popt.seed = Rng::substream(seed, 0x101).next_u64();
        m.prior = stage("train-prior", [&] { return train_prior(data.train, m.feat_stats, popt); });
    }
    if (!s.ensemble_checkpoint.empty()) {
        m.ensemble =
            stage("load-ensemble", [&] { return QEnsemble::load_file(s.ensemble_checkpoint); });
    } else {
        EnsembleTrainOptions eopt = s.ens_opt;
        eopt.seed = Rng::substream(seed, 0x202).next_u64();
        m.ensemble = stage("train-ensemble", [&] {
            return train_ensemble(data.train, m.feat_stats, m.prior, s.policy.alpha_hybrid, eopt);
        });
    }
    return m;
}

namespace {

json evaluate_policies(const ExperimentSetup& s, const DatasetPair& data, const Models& models,
                       std::uint64_t seed, const fs::path& out, const std::string& suffix,
                       std::vector<std::string>& files) {
    json entries = json::object();
    for (const auto& policy : s.policies) {
        RunOptions opt;
        opt.k_fixed = s.k_fixed;
        opt.linucb_alpha = s.linucb_alpha;
        opt.linucb_ridge = s.linucb_ridge;
        std::ostringstream trace;
        if (s.trace) opt.trace = &trace;

        const bool needs_models = policy != "random" && policy != "linucb";
        const auto outcomes = stage("eval", [&] {
            return run_policy(policy, data.test, needs_models ? &models : nullptr, s.policy,
                              s.temperature, opt, seed);
        });
        const auto metrics = compute_metrics(policy, outcomes, data.test, s.policy.theta,
                                             s.policy.c_K, s.policy.c_out);
        entries[policy] = metrics.to_json();

        std::ostringstream cdf;
        snr_cdf_export(outcomes, cdf);
        const std::string cdf_name = "cdf_" + policy + suffix + ".csv";
        write_text(out / cdf_name, cdf.str());
        files.push_back(cdf_name);
        if (s.trace) {
            const std::string trace_name = "trace_" + policy + suffix + ".log";
            write_text(out / trace_name, trace.str());
            files.push_back(trace_name);
        }
    }
    return entries;
}

json aggregate_over_seeds(const json& per_seed_reports) {
    json agg = json::object();
    for (const auto& [seed_key, report] : per_seed_reports.items()) {
        (void)seed_key;
        for (const auto& [policy, metrics] : report.at("policies").items()) {
            for (const auto& [field, value] : metrics.items()) {
                if (!value.is_number()) continue;
                agg[policy][field].push_back(value.get<double>());
            }
        }
    }
    json out = json::object();
    for (const auto& [policy, fields] : agg.items()) {
        for (const auto& [field, values] : fields.items()) {
            double acc = 0.0;
            for (const auto& v : values) acc += v.get<double>();
            out[policy][field] = acc / static_cast<double>(values.size());
        }
    }
    return out;
}

std::string metrics_table(const json& policies_json) {
    std::string csv = metrics_csv_header() + "\n";
    for (const auto& [policy, m] : policies_json.items()) {
        csv += policy;
        for (const char* f : {"top1", "top3", "mean_K", "outage_rate", "shield_rate",
                              "snr_mean_db", "snr_p05_db", "p2"})
            csv += "," + format_double(m.at(f).get<double>());
        csv += "\n";
    }
    return csv;
}

}  // namespace

json run_experiment(const json& cfg) {
    const ExperimentSetup s = parse_experiment(cfg);
    const fs::path out(s.out_dir);
    fs::create_directories(out);
    const auto data = build_datasets(s);
    const std::string cfg_digest = fnv1a64_hex(cfg.dump());
    const std::string ds_digest = dataset_digest(data.test);

    std::vector<std::string> files;
    json per_seed = json::object();
    for (const auto seed : s.seeds) {
        const auto models = train_models(data, s, seed);
        const std::string suffix = "_seed" + std::to_string(seed);
        json report;
        report["meta"] = json{{"seed", seed},
                              {"config_digest", cfg_digest},
                              {"dataset_digest", ds_digest},
                              {"train_digest", dataset_digest(data.train)},
                              {"n_train", data.train.sweeps.size()},
                              {"n_test", data.test.sweeps.size()},
                              {"B", data.test.B}};
        report["policies"] = evaluate_policies(s, data, models, seed, out, suffix, files);
        const std::string name = "report" + suffix + ".json";
        write_text(out / name, report.dump(2) + "\n");
        files.push_back(name);
        write_text(out / ("metrics" + suffix + ".csv"), metrics_table(report["policies"]));
        files.push_back("metrics" + suffix + ".csv");
        per_seed[std::to_string(seed)] = std::move(report);
    }

    json aggregate;
    aggregate["meta"] = json{{"seeds", s.seeds},
                             {"config_digest", cfg_digest},
                             {"dataset_digest", ds_digest},
                             {"policies", s.policies}};
    aggregate["mean_over_seeds"] = aggregate_over_seeds(per_seed);
    aggregate["per_seed"] = per_seed;
    write_text(out / "report.json", aggregate.dump(2) + "\n");
    files.push_back("report.json");
    write_text(out / "metrics.csv", metrics_table(aggregate["mean_over_seeds"]));
    files.push_back("metrics.csv");

    json manifest;
    std::sort(files.begin(), files.end());
    manifest["files"] = files;
    manifest["config_digest"] = cfg_digest;
    write_text(out / "manifest.json", manifest.dump(2) + "\n");
    return aggregate;
}

json run_ablation(const json& cfg) {
    ExperimentSetup s = parse_experiment(cfg);
    const fs::path out(s.out_dir);
    fs::create_directories(out);
    const auto data = build_datasets(s);
    const std::uint64_t seed = s.seeds.front();
    const std::string cfg_digest = fnv1a64_hex(cfg.dump());

    json rows = json::object();
    std::vector<std::string> files;

    // Score-term switches at matched budget, shared models.
    {
        const auto models = train_models(data, s, seed);
        struct Variant {
            const char* name;
            double lambda, beta;
        };
        const Variant variants[] = {{"score_full", s.policy.lambda, s.policy.beta},
                                    {"score_lambda0", 0.0, s.policy.beta},
                                    {"score_lambda1", 1.0, s.policy.beta},
                                    {"score_beta0", s.policy.lambda, 0.0}};
        for (const auto& v : variants) {
            ExperimentSetup vs = s;
            vs.policy.lambda = v.lambda;
            vs.policy.beta = v.beta;
            vs.policies = {"ours_fixed"};
            vs.trace = false;
            json entry = evaluate_policies(vs, data, models, seed, out,
                                           std::string("_") + v.name, files);
            rows[v.name] = entry.at("ours_fixed");
        }
    }

    // Modality dropout at matched budget; retrain per subset so each row
    // reflects the information the remaining sensors carry.
    const struct {
        const char* name;
        std::array<bool, 3> mask;
    } subsets[] = {{"sensors_all", {true, true, true}},   {"no_radar", {false, true, true}},
                   {"no_lidar", {true, false, true}},     {"no_camera", {true, true, false}},
                   {"radar_only", {true, false, false}},  {"lidar_only", {false, true, false}},
                   {"camera_only", {false, false, true}}};
    for (const auto& sub : subsets) {
        DatasetPair masked;
        masked.train = mask_modalities(data.train, sub.mask);
        masked.test = mask_modalities(data.test, sub.mask);
        const auto stats = fit_feature_stats(masked.train);
        masked.train.norm_stats = stats;
        masked.test.norm_stats = stats;
        ExperimentSetup vs = s;
        vs.policies = {"ours_fixed"};
        vs.trace = false;
        const auto models = train_models(masked, vs, seed);
        json entry =
            evaluate_policies(vs, masked, models, seed, out, std::string("_") + sub.name, files);
        rows[sub.name] = entry.at("ours_fixed");
    }

    json report;
    report["meta"] = json{{"seed", seed},
                          {"config_digest", cfg_digest},
                          {"k_fixed", s.k_fixed},
                          {"kind", "ablation"}};
    report["rows"] = rows;
    write_text(out / "ablation.json", report.dump(2) + "\n");
    write_text(out / "ablation.csv", metrics_table(rows));
    return report;
}

json run_codebook_sweep(const json& cfg) {
    ExperimentSetup s = parse_experiment(cfg);
    std::vector<int> sizes{9, 13, 17, 21};
    if (cfg.contains("run") && cfg.at("run").contains("codebook_sizes"))
        sizes = cfg.at("run").at("codebook_sizes").get<std::vector<int>>();
    const fs::path out(s.out_dir);
    fs::create_directories(out);
    const auto data = build_datasets(s);
    const std::uint64_t seed = s.seeds.front();

    json rows = json::object();
    std::vector<std::string> files;
    for (int b_used : sizes) {
        DatasetPair cut;
        cut.train = subcodebook(data.train, b_used);
        cut.test = subcodebook(data.test, b_used);
        cut.train.norm_stats = data.train.norm_stats;
        cut.test.norm_stats = data.test.norm_stats;
        ExperimentSetup vs = s;
        vs.policies = {"ours_adaptive"};
        vs.trace = false;
        const auto models = train_models(cut, vs, seed);
        json entry = evaluate_policies(vs, cut, models, seed, out,
                                       "_B" + std::to_string(b_used), files);
        rows["B=" + std::to_string(b_used)] = entry.at("ours_adaptive");
    }

    json report;
    report["meta"] = json{{"seed", seed},
                          {"config_digest", fnv1a64_hex(cfg.dump())},
                          {"codebook_sizes", sizes},
                          {"kind", "codebook_sweep"}};
    report["rows"] = rows;
    write_text(out / "codebook_sweep.json", report.dump(2) + "\n");
    write_text(out / "codebook_sweep.csv", metrics_table(rows));
    return report;
}

json run_generate(const json& cfg) {
    const ExperimentSetup s = parse_experiment(cfg);
    if (s.use_import) throw ConfigError("generate: config must describe a scene");
    const fs::path out(s.out_dir);
    fs::create_directories(out);
    const auto data = build_datasets(s);
    write_dataset((out / "train").string(), data.train);
    write_dataset((out / "test").string(), data.test);
    json report{{"train_digest", dataset_digest(data.train)},
                {"test_digest", dataset_digest(data.test)},
                {"n_train", data.train.sweeps.size()},
                {"n_test", data.test.sweeps.size()},
                {"out", s.out_dir}};
    write_text(out / "generate.json", report.dump(2) + "\n");
    return report;
}

json run_train(const json& cfg) {
    const ExperimentSetup s = parse_experiment(cfg);
    const fs::path out(s.out_dir);
    fs::create_directories(out);
    const auto data = build_datasets(s);
    const auto models = train_models(data, s, s.seeds.front());
    models.prior.save_file((out / "prior.ckpt").string());
    models.ensemble.save_file((out / "ensemble.ckpt").string());
    json stats_doc{{"feature_stats", models.feat_stats.to_json()},
                   {"logit_stats",
                    {{"mu_train", models.prior.stats.mu_train},
                     {"sigma_train", models.prior.stats.sigma_train},
                     {"epsilon", models.prior.stats.epsilon}}},
                   {"train_digest", dataset_digest(data.train)},
                   {"seed", s.seeds.front()}};
    write_text(out / "train.json", stats_doc.dump(2) + "\n");
    return stats_doc;
}

}  // namespace beamsim
