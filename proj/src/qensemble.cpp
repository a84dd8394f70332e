#include "beamsim/qensemble.hpp"

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

QEnsemble::QEnsemble(std::vector<DenseNet> members) : members_(std::move(members)) {
    if (members_.size() < 2) throw ConfigError("QEnsemble: need at least 2 members");
    for (const auto& m : members_)
        if (m.layer_sizes() != members_[0].layer_sizes())
            throw ConfigError("QEnsemble: members must share layer shapes");
}

EnsembleEstimate QEnsemble::estimate(std::span<const double> x, double epsilon) const {
    if (members_.empty()) throw std::domain_error("QEnsemble: empty ensemble");
    const int B = members_[0].output_dim();
    const double M = static_cast<double>(members_.size());
    EnsembleEstimate est;
    est.mu.assign(B, 0.0);
    est.tau.assign(B, 0.0);
    est.sigma_hat.assign(B, 0.0);
    std::vector<std::vector<double>> outs;
    outs.reserve(members_.size());
    for (const auto& m : members_) outs.push_back(m.forward(x));
    for (int b = 0; b < B; ++b) {
        for (const auto& o : outs) est.mu[b] += o[b];
        est.mu[b] /= M;
        for (const auto& o : outs) est.tau[b] += (o[b] - est.mu[b]) * (o[b] - est.mu[b]);
        est.tau[b] = std::sqrt(est.tau[b] / M);
    }
    const double tau_max = *std::max_element(est.tau.begin(), est.tau.end());
    for (int b = 0; b < B; ++b) est.sigma_hat[b] = est.tau[b] / (tau_max + epsilon);
    return est;
}

std::uint64_t QEnsemble::forward_count() const {
    std::uint64_t c = 0;
    for (const auto& m : members_) c += m.forward_count();
    return c;
}

void QEnsemble::reset_forward_count() const {
    for (const auto& m : members_) m.reset_forward_count();
}

double qmember_loss_grad(const DenseNet& net, std::span<const double> x,
                         std::span<const double> target, DenseNet* grad) {
    DenseNet::Cache cache;
    const auto y = net.forward_train(x, cache);
    if (y.size() != target.size()) throw std::domain_error("qmember_loss_grad: target size");
    double loss = 0.0;
    std::vector<double> dout(y.size());
    for (std::size_t b = 0; b < y.size(); ++b) {
        const double e = y[b] - target[b];
        loss += 0.5 * e * e;
        dout[b] = e;
    }
    if (grad) net.backward(cache, dout, *grad);
    return loss;
}

namespace {
thread_local std::vector<std::vector<double>> g_ens_loss_curves;
}

const std::vector<std::vector<double>>& last_ensemble_loss_curves() { return g_ens_loss_curves; }

QEnsemble train_ensemble(const SynthDataset& train, const FeatureStats& feat_stats,
                         const PriorModel& prior, double alpha_hybrid,
                         const EnsembleTrainOptions& opt) {
    if (opt.members < 2) throw ConfigError("train_ensemble: need M >= 2 members");
    if (train.sweeps.empty()) throw TrainError("train_ensemble: empty train split");
    const int B = train.B;
    const int n = static_cast<int>(train.sweeps.size());

    // Hybrid targets: IQ reward rows blended with the sensing prior's
    // unit-temperature pmf of standardized logits.
    std::vector<std::vector<double>> X(n), T(n);
    for (int i = 0; i < n; ++i) {
        const auto& s = train.sweeps[i];
        if (!s.reward_row) throw TrainError("train_ensemble: sweep lacks reward row");
        X[i] = feat_stats.apply(s.features);
        DenseNet::Cache cache;
        const auto logits = prior.net.forward_train(X[i], cache);
        const auto pi_sense = softmax(standardize_logits(logits, prior.stats), 1.0);
        T[i] = hybrid_target(*s.reward_row, pi_sense, alpha_hybrid).values;
    }

    std::vector<int> sizes;
    sizes.push_back(static_cast<int>(X[0].size()));
    for (int h : opt.hidden) sizes.push_back(h);
    sizes.push_back(B);

    g_ens_loss_curves.assign(opt.members, {});
    std::vector<DenseNet> members;
    std::vector<std::uint64_t> seeds;
    members.reserve(opt.members);
    for (int m = 0; m < opt.members; ++m) {
        const std::uint64_t member_seed = Rng::substream(opt.seed, 0x9000 + m).next_u64();
        seeds.push_back(member_seed);
        Rng init = Rng::substream(member_seed, 0x1);
        DenseNet net(sizes, init);
        DenseNet grad = DenseNet::zeros_like(net);

        // Bootstrap resample, same size as the train split.
        Rng boot = Rng::substream(member_seed, 0x2);
        std::vector<int> rows(n);
        for (int i = 0; i < n; ++i) rows[i] = boot.uniform_int(0, n - 1);

        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        for (int epoch = 0; epoch < opt.epochs; ++epoch) {
            Rng shuf = Rng::substream(member_seed, 0x100 + epoch);
            shuf.shuffle(order.begin(), order.end());
            double epoch_loss = 0.0;
            for (int start = 0; start < n; start += opt.batch) {
                const int stop = std::min(n, start + opt.batch);
                const double inv = 1.0 / (stop - start);
                grad.fill(0.0);
                for (int k = start; k < stop; ++k) {
                    const int i = rows[order[k]];
                    epoch_loss += qmember_loss_grad(net, X[i], T[i], &grad);
                }
                net.add_scaled(grad, -opt.lr * inv);
            }
            epoch_loss /= n;
            if (!std::isfinite(epoch_loss))
                throw TrainError("train_ensemble: member " + std::to_string(m) +
                                 " diverged at epoch " + std::to_string(epoch));
            g_ens_loss_curves[m].push_back(epoch_loss);
        }
        members.push_back(std::move(net));
    }

    QEnsemble ens(std::move(members));
    ens.member_seeds = std::move(seeds);
    ens.alpha_hybrid_used = alpha_hybrid;
    return ens;
}

namespace {
constexpr std::uint32_t kEnsMagic = 0x534E5342u;  // "BSNS"
constexpr std::uint32_t kEnsVersion = 1;
}  // namespace

void QEnsemble::save(std::ostream& out) const {
    out.write(reinterpret_cast<const char*>(&kEnsMagic), 4);
    out.write(reinterpret_cast<const char*>(&kEnsVersion), 4);
    const std::uint32_t m = static_cast<std::uint32_t>(members_.size());
    out.write(reinterpret_cast<const char*>(&m), 4);
    out.write(reinterpret_cast<const char*>(&alpha_hybrid_used), 8);
    for (std::uint32_t i = 0; i < m; ++i) {
        const std::uint64_t s = i < member_seeds.size() ? member_seeds[i] : 0;
        out.write(reinterpret_cast<const char*>(&s), 8);
    }
    for (const auto& net : members_) net.save(out);
}

QEnsemble QEnsemble::load(std::istream& in) {
    std::uint32_t magic = 0, version = 0, m = 0;
    in.read(reinterpret_cast<char*>(&magic), 4);
    in.read(reinterpret_cast<char*>(&version), 4);
    if (!in || magic != kEnsMagic) throw std::runtime_error("QEnsemble: bad magic");
    if (version != kEnsVersion) throw std::runtime_error("QEnsemble: bad version");
    in.read(reinterpret_cast<char*>(&m), 4);
    QEnsemble ens;
    in.read(reinterpret_cast<char*>(&ens.alpha_hybrid_used), 8);
    ens.member_seeds.resize(m);
    for (auto& s : ens.member_seeds) in.read(reinterpret_cast<char*>(&s), 8);
    if (!in) throw std::runtime_error("QEnsemble: truncated header");
    for (std::uint32_t i = 0; i < m; ++i) ens.members_.push_back(DenseNet::load(in));
    return ens;
}

void QEnsemble::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    save(out);
}

QEnsemble QEnsemble::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    return load(in);
}

}  // namespace beamsim
