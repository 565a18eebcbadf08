#pragma once

#include <cstdint>
#include <vector>

#include "sgb/tensor.hpp"

namespace sgb {

struct AdamConfig {
    double lr = 2e-5;
    double beta1 = 0.9;
    double beta2 = 0.98;
    double epsilon = 1e-8;
};

// Bias-corrected Adam over a fixed parameter list. Moment buffers are
// allocated per parameter at construction and updated in place by step().
class AdamState {
public:
    AdamState(std::vector<TensorPtr> params, AdamConfig config);

    // Applies one update from the parameters' current grads. Throws on any
    // non-finite gradient so a blown-up step never reaches the weights.
    void step();

    std::int64_t step_count() const { return step_; }
    const AdamConfig& config() const { return config_; }

private:
    std::vector<TensorPtr> params_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    AdamConfig config_;
    std::int64_t step_ = 0;
};

// Scales all grads so their global L2 norm is at most max_norm.
// Returns the pre-clip norm.
double clip_global_grad_norm(const std::vector<TensorPtr>& params, double max_norm);

}  // namespace sgb
