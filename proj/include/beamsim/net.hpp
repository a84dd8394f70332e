#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace beamsim {

class Rng;

// Small dense feed-forward network: rectifier hidden layers, identity output.
// Parameters live in one flat vector (per layer: weights row-major, then
// biases) so gradient objects, SGD updates, finite-difference probes, and
// checkpoint payloads all share one layout.
class DenseNet {
public:
    DenseNet() = default;
    DenseNet(std::vector<int> layer_sizes, Rng& rng);  // He-scaled normal init, zero biases

    static DenseNet zeros_like(const DenseNet& other);

    const std::vector<int>& layer_sizes() const { return sizes_; }
    int input_dim() const { return sizes_.front(); }
    int output_dim() const { return sizes_.back(); }

    // Inference path; bumps the forward counter used by overhead audits.
    std::vector<double> forward(std::span<const double> x) const;

    // Training path keeps every activation for backprop and does not count.
    struct Cache {
        std::vector<std::vector<double>> act;  // act[0] = input, act.back() = output
    };
    std::vector<double> forward_train(std::span<const double> x, Cache& cache) const;

    // Accumulates dLoss/dparams into `grad` given dLoss/doutput.
    void backward(const Cache& cache, std::span<const double> dout, DenseNet& grad) const;

    void add_scaled(const DenseNet& g, double a);  // params += a * g.params
    void fill(double v);

    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    std::uint64_t forward_count() const { return forward_count_; }
    void reset_forward_count() const { forward_count_ = 0; }

    // Binary checkpoint block: "BSN1" magic, version, layer sizes, raw
    // little-endian double payload. Round-trips bit-exactly.
    void save(std::ostream& out) const;
    static DenseNet load(std::istream& in);

private:
    std::vector<int> sizes_;
    std::vector<double> params_;
    std::vector<std::size_t> w_off_, b_off_;  // per-layer offsets into params_
    mutable std::uint64_t forward_count_ = 0;

    void build_offsets();
    int layers() const { return static_cast<int>(sizes_.size()) - 1; }
};

}  // namespace beamsim
