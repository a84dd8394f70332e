#include "beamsim/net.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "beamsim/rng.hpp"

static_assert(std::endian::native == std::endian::little, "checkpoint layout assumes little-endian");
static_assert(sizeof(double) == 8);

namespace beamsim {

void DenseNet::build_offsets() {
    w_off_.clear();
    b_off_.clear();
    std::size_t off = 0;
    for (int l = 0; l < layers(); ++l) {
        w_off_.push_back(off);
        off += static_cast<std::size_t>(sizes_[l + 1]) * sizes_[l];
        b_off_.push_back(off);
        off += static_cast<std::size_t>(sizes_[l + 1]);
    }
    params_.resize(off, 0.0);
}

DenseNet::DenseNet(std::vector<int> layer_sizes, Rng& rng) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw std::domain_error("DenseNet: need at least input and output layer");
    for (int s : sizes_)
        if (s < 1) throw std::domain_error("DenseNet: layer sizes must be positive");
    build_offsets();
    for (int l = 0; l < layers(); ++l) {
        const double scale = std::sqrt(2.0 / sizes_[l]);
        const std::size_t n = static_cast<std::size_t>(sizes_[l + 1]) * sizes_[l];
        for (std::size_t i = 0; i < n; ++i) params_[w_off_[l] + i] = rng.normal(0.0, scale);
        // biases stay zero
    }
}

DenseNet DenseNet::zeros_like(const DenseNet& other) {
    DenseNet n;
    n.sizes_ = other.sizes_;
    n.build_offsets();
    return n;
}

std::vector<double> DenseNet::forward(std::span<const double> x) const {
    ++forward_count_;
    Cache cache;
    return forward_train(x, cache);
}

std::vector<double> DenseNet::forward_train(std::span<const double> x, Cache& cache) const {
    if (static_cast<int>(x.size()) != input_dim())
        throw std::domain_error("DenseNet: input dimension mismatch");
    cache.act.assign(sizes_.size(), {});
    cache.act[0].assign(x.begin(), x.end());
    for (int l = 0; l < layers(); ++l) {
        const int in = sizes_[l], out = sizes_[l + 1];
        const double* W = params_.data() + w_off_[l];
        const double* b = params_.data() + b_off_[l];
        const auto& a = cache.act[l];
        auto& y = cache.act[l + 1];
        y.assign(out, 0.0);
        for (int o = 0; o < out; ++o) {
            double acc = b[o];
            const double* row = W + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) acc += row[i] * a[i];
            y[o] = (l < layers() - 1) ? (acc > 0.0 ? acc : 0.0) : acc;
        }
    }
    return cache.act.back();
}

void DenseNet::backward(const Cache& cache, std::span<const double> dout, DenseNet& grad) const {
    if (static_cast<int>(dout.size()) != output_dim())
        throw std::domain_error("DenseNet: gradient dimension mismatch");
    std::vector<double> delta(dout.begin(), dout.end());
    for (int l = layers() - 1; l >= 0; --l) {
        const int in = sizes_[l], out = sizes_[l + 1];
        const auto& a = cache.act[l];
        double* gW = grad.params_.data() + w_off_[l];
        double* gb = grad.params_.data() + b_off_[l];
        for (int o = 0; o < out; ++o) {
            gb[o] += delta[o];
            double* row = gW + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) row[i] += delta[o] * a[i];
        }
        if (l == 0) break;
        const double* W = params_.data() + w_off_[l];
        std::vector<double> prev(in, 0.0);
        for (int o = 0; o < out; ++o) {
            const double* row = W + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) prev[i] += row[i] * delta[o];
        }
        // rectifier gate: activation value > 0 iff the unit was live
        for (int i = 0; i < in; ++i)
            if (cache.act[l][i] <= 0.0) prev[i] = 0.0;
        delta = std::move(prev);
    }
}

void DenseNet::add_scaled(const DenseNet& g, double a) {
    if (g.params_.size() != params_.size()) throw std::domain_error("DenseNet: shape mismatch");
    for (std::size_t i = 0; i < params_.size(); ++i) params_[i] += a * g.params_[i];
}

void DenseNet::fill(double v) { std::fill(params_.begin(), params_.end(), v); }

namespace {
constexpr std::uint32_t kNetMagic = 0x314E5342u;  // "BSN1"
constexpr std::uint32_t kNetVersion = 1;

template <class T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("DenseNet: truncated checkpoint");
    return v;
}
}  // namespace

void DenseNet::save(std::ostream& out) const {
    put(out, kNetMagic);
    put(out, kNetVersion);
    put(out, static_cast<std::uint32_t>(sizes_.size()));
    for (int s : sizes_) put(out, static_cast<std::int32_t>(s));
    put(out, static_cast<std::uint64_t>(params_.size()));
    out.write(reinterpret_cast<const char*>(params_.data()),
              static_cast<std::streamsize>(params_.size() * sizeof(double)));
}

DenseNet DenseNet::load(std::istream& in) {
    if (get<std::uint32_t>(in) != kNetMagic) throw std::runtime_error("DenseNet: bad magic");
    if (get<std::uint32_t>(in) != kNetVersion) throw std::runtime_error("DenseNet: bad version");
    const auto n = get<std::uint32_t>(in);
    DenseNet net;
    net.sizes_.resize(n);
    for (auto& s : net.sizes_) s = get<std::int32_t>(in);
    net.build_offsets();
    const auto count = get<std::uint64_t>(in);
    if (count != net.params_.size()) throw std::runtime_error("DenseNet: payload size mismatch");
    in.read(reinterpret_cast<char*>(net.params_.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("DenseNet: truncated payload");
    return net;
}

}  // namespace beamsim
