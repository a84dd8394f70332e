#include "beamsim/prior.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "beamsim/errors.hpp"
#include "beamsim/measurement.hpp"
#include "beamsim/rng.hpp"
#include "beamsim/stats.hpp"

namespace beamsim {

double entropy(std::span<const double> pmf) {
    if (pmf.empty()) throw std::domain_error("entropy: empty pmf");
    double mass = 0.0, h = 0.0;
    for (double p : pmf) {
        if (p < 0.0) throw std::domain_error("entropy: negative mass");
        mass += p;
        if (p > 0.0) h -= p * std::log(p);
    }
    if (std::abs(mass - 1.0) > 1e-9)
        throw std::domain_error("entropy: mass sums to " + std::to_string(mass));
    return h;
}

std::vector<double> standardize_logits(std::span<const double> z, const LogitStats& stats) {
    std::vector<double> out(z.size());
    const double denom = stats.sigma_train + stats.epsilon;
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = (z[i] - stats.mu_train) / denom;
    return out;
}

double effective_temperature(double s_hat, double u_norm, const TemperatureConfig& cfg) {
    if (!(s_hat > 0.0)) throw std::domain_error("effective_temperature: sharpness must be positive");
    const double t =
        cfg.T0 * std::pow(s_hat / cfg.s_min, -cfg.alpha_temp) * (1.0 + cfg.gamma * u_norm);
    return std::clamp(t, cfg.T_min, cfg.T_max);
}

CalibratedPrior calibrate(std::span<const double> z_std, double T_eff) {
    if (!(T_eff > 0.0)) throw std::domain_error("calibrate: temperature must be positive");
    for (double z : z_std)
        if (!std::isfinite(z)) throw std::domain_error("calibrate: non-finite logit");
    CalibratedPrior p;
    p.T_eff = T_eff;
    p.pmf = softmax(z_std, T_eff);
    p.entropy_nats = entropy(p.pmf);
    const auto unit = softmax(z_std, 1.0);
    p.sharpness = *std::max_element(unit.begin(), unit.end());
    return p;
}

double prior_loss_grad(const DenseNet& net, std::span<const double> x,
                       std::span<const double> soft_target, double class_weight, DenseNet* grad) {
    DenseNet::Cache cache;
    const auto logits = net.forward_train(x, cache);
    const auto p = softmax(logits, 1.0);
    double loss = 0.0;
    for (std::size_t b = 0; b < p.size(); ++b)
        if (soft_target[b] > 0.0) loss -= soft_target[b] * std::log(std::max(p[b], 1e-300));
    loss *= class_weight;
    if (grad) {
        std::vector<double> dlogits(p.size());
        for (std::size_t b = 0; b < p.size(); ++b)
            dlogits[b] = class_weight * (p[b] - soft_target[b]);
        net.backward(cache, dlogits, *grad);
    }
    return loss;
}

namespace {
thread_local std::vector<double> g_prior_loss_curve;
}

const std::vector<double>& last_prior_loss_curve() { return g_prior_loss_curve; }

PriorModel train_prior(const SynthDataset& train, const FeatureStats& feat_stats,
                       const PriorTrainOptions& opt) {
    if (train.sweeps.empty()) throw TrainError("train_prior: empty train split");
    const int B = train.B;
    const int n = static_cast<int>(train.sweeps.size());

    // Standardized inputs and soft targets up front.
    std::vector<std::vector<double>> X(n);
    std::vector<std::vector<double>> Q(n);
    std::vector<int> label(n);
    for (int i = 0; i < n; ++i) {
        const auto& s = train.sweeps[i];
        if (!s.reward_row) throw TrainError("train_prior: sweep lacks reward row");
        X[i] = feat_stats.apply(s.features);
        const auto z = zscore_row(*s.reward_row);
        std::vector<double> scaled(z.size());
        for (std::size_t b = 0; b < z.size(); ++b) scaled[b] = z[b] / opt.label_temp;
        Q[i] = softmax(scaled, 1.0);
        label[i] = s.oracle_beam ? *s.oracle_beam : oracle_beam(*s.reward_row);
    }

    // Class weights: inverse oracle-label frequency, mean-normalized.
    std::vector<int> count(B, 0);
    for (int i = 0; i < n; ++i) ++count[label[i] - 1];
    std::vector<double> weight(B, 0.0);
    for (int c = 0; c < B; ++c)
        weight[c] = static_cast<double>(n) / (static_cast<double>(B) * std::max(count[c], 1));

    std::vector<int> sizes;
    sizes.push_back(static_cast<int>(X[0].size()));
    for (int h : opt.hidden) sizes.push_back(h);
    sizes.push_back(B);
    Rng init = Rng::substream(opt.seed, 0x1);
    DenseNet net(sizes, init);
    DenseNet grad = DenseNet::zeros_like(net);

    g_prior_loss_curve.clear();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        Rng shuf = Rng::substream(opt.seed, 0x100 + epoch);
        shuf.shuffle(order.begin(), order.end());
        double epoch_loss = 0.0;
        for (int start = 0; start < n; start += opt.batch) {
            const int stop = std::min(n, start + opt.batch);
            const double inv = 1.0 / (stop - start);
            grad.fill(0.0);
            double batch_loss = 0.0;
            for (int k = start; k < stop; ++k) {
                const int i = order[k];
                batch_loss += prior_loss_grad(net, X[i], Q[i], weight[label[i] - 1], &grad);
            }
            net.add_scaled(grad, -opt.lr * inv);
            epoch_loss += batch_loss;
        }
        epoch_loss /= n;
        if (!std::isfinite(epoch_loss))
            throw TrainError("train_prior: loss diverged at epoch " + std::to_string(epoch));
        g_prior_loss_curve.push_back(epoch_loss);
    }

    // Global logit statistics over the trained model's train-split outputs.
    double mu = 0.0;
    std::vector<std::vector<double>> logits(n);
    for (int i = 0; i < n; ++i) {
        DenseNet::Cache cache;
        logits[i] = net.forward_train(X[i], cache);
        for (double z : logits[i]) mu += z;
    }
    const double total = static_cast<double>(n) * B;
    mu /= total;
    double var = 0.0;
    for (const auto& row : logits)
        for (double z : row) var += (z - mu) * (z - mu);

    PriorModel model;
    model.net = std::move(net);
    model.stats.mu_train = mu;
    model.stats.sigma_train = std::sqrt(var / total);
    model.stats.epsilon = 1e-9;
    return model;
}

namespace {
constexpr std::uint32_t kPriorMagic = 0x52505342u;  // "BSPR"
constexpr std::uint32_t kPriorVersion = 1;
}  // namespace

void PriorModel::save(std::ostream& out) const {
    out.write(reinterpret_cast<const char*>(&kPriorMagic), 4);
    out.write(reinterpret_cast<const char*>(&kPriorVersion), 4);
    net.save(out);
    out.write(reinterpret_cast<const char*>(&stats.mu_train), 8);
    out.write(reinterpret_cast<const char*>(&stats.sigma_train), 8);
    out.write(reinterpret_cast<const char*>(&stats.epsilon), 8);
}

PriorModel PriorModel::load(std::istream& in) {
    std::uint32_t magic = 0, version = 0;
    in.read(reinterpret_cast<char*>(&magic), 4);
    in.read(reinterpret_cast<char*>(&version), 4);
    if (!in || magic != kPriorMagic) throw std::runtime_error("PriorModel: bad magic");
    if (version != kPriorVersion) throw std::runtime_error("PriorModel: bad version");
    PriorModel m;
    m.net = DenseNet::load(in);
    in.read(reinterpret_cast<char*>(&m.stats.mu_train), 8);
    in.read(reinterpret_cast<char*>(&m.stats.sigma_train), 8);
    in.read(reinterpret_cast<char*>(&m.stats.epsilon), 8);
    if (!in) throw std::runtime_error("PriorModel: truncated checkpoint");
    return m;
}

void PriorModel::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    save(out);
}

PriorModel PriorModel::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    return load(in);
}

}  // namespace beamsim
