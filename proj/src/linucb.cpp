#include "beamsim/linucb.hpp"

#include <cmath>
#include <stdexcept>

namespace beamsim {

LinUcb::LinUcb(int n_arms, int dim, double alpha, double ridge) : dim_(dim), alpha_(alpha) {
    if (n_arms < 1 || dim < 1) throw std::domain_error("LinUcb: bad dimensions");
    if (!(ridge > 0.0)) throw std::domain_error("LinUcb: ridge must be positive");
    arms_.resize(n_arms);
    for (auto& a : arms_) {
        a.a_inv.assign(static_cast<std::size_t>(dim) * dim, 0.0);
        for (int i = 0; i < dim; ++i) a.a_inv[static_cast<std::size_t>(i) * dim + i] = 1.0 / ridge;
        a.b.assign(dim, 0.0);
        a.theta.assign(dim, 0.0);
        a.theta_fresh = true;
    }
}

std::vector<double> LinUcb::scores(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) throw std::domain_error("LinUcb: context size");
    std::vector<double> out(arms_.size(), 0.0);
    std::vector<double> ax(dim_);
    for (std::size_t k = 0; k < arms_.size(); ++k) {
        const auto& a = arms_[k];
        double mean = 0.0, quad = 0.0;
        for (int i = 0; i < dim_; ++i) {
            double acc = 0.0;
            const double* row = a.a_inv.data() + static_cast<std::size_t>(i) * dim_;
            for (int j = 0; j < dim_; ++j) acc += row[j] * x[j];
            ax[i] = acc;
            quad += acc * x[i];
            mean += a.theta[i] * x[i];
        }
        out[k] = mean + alpha_ * std::sqrt(quad > 0.0 ? quad : 0.0);
    }
    return out;
}

void LinUcb::update(int arm, std::span<const double> x, double reward) {
    if (arm < 0 || arm >= static_cast<int>(arms_.size()))
        throw std::domain_error("LinUcb: arm out of range");
    if (static_cast<int>(x.size()) != dim_) throw std::domain_error("LinUcb: context size");
    auto& a = arms_[arm];

    // Sherman-Morrison rank-1 update of A^-1 with xx'.
    std::vector<double> ax(dim_, 0.0);
    double denom = 1.0;
    for (int i = 0; i < dim_; ++i) {
        double acc = 0.0;
        const double* row = a.a_inv.data() + static_cast<std::size_t>(i) * dim_;
        for (int j = 0; j < dim_; ++j) acc += row[j] * x[j];
        ax[i] = acc;
        denom += acc * x[i];
    }
    for (int i = 0; i < dim_; ++i) {
        double* row = a.a_inv.data() + static_cast<std::size_t>(i) * dim_;
        for (int j = 0; j < dim_; ++j) row[j] -= ax[i] * ax[j] / denom;
    }
    for (int i = 0; i < dim_; ++i) a.b[i] += reward * x[i];

    // theta = A^-1 b
    for (int i = 0; i < dim_; ++i) {
        double acc = 0.0;
        const double* row = a.a_inv.data() + static_cast<std::size_t>(i) * dim_;
        for (int j = 0; j < dim_; ++j) acc += row[j] * a.b[j];
        a.theta[i] = acc;
    }
}

}  // namespace beamsim
