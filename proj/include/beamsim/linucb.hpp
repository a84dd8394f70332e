#pragma once

#include <span>
#include <vector>

namespace beamsim {

// Disjoint linear UCB: one ridge regression per arm, incremental inverse
// via Sherman-Morrison. Scores are theta' x + alpha * sqrt(x' A^-1 x).
class LinUcb {
public:
    LinUcb(int n_arms, int dim, double alpha, double ridge);

    std::vector<double> scores(std::span<const double> x) const;
    void update(int arm /*0-based*/, std::span<const double> x, double reward);

    int n_arms() const { return static_cast<int>(arms_.size()); }
    int dim() const { return dim_; }

private:
    struct Arm {
        std::vector<double> a_inv;  // dim x dim, row-major
        std::vector<double> b;
        std::vector<double> theta;
        bool theta_fresh = false;
    };

    int dim_;
    double alpha_;
    std::vector<Arm> arms_;
};

}  // namespace beamsim
