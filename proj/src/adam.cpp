#include "sgb/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace sgb {

AdamState::AdamState(std::vector<TensorPtr> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
    if (config_.beta1 <= 0.0 || config_.beta1 >= 1.0 || config_.beta2 <= 0.0 || config_.beta2 >= 1.0) {
        throw std::invalid_argument("adam: betas must lie in (0, 1)");
    }
    if (config_.lr <= 0.0) throw std::invalid_argument("adam: lr must be positive");
    if (config_.epsilon <= 0.0) throw std::invalid_argument("adam: epsilon must be positive");
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const auto& p : params_) {
        m_.emplace_back(p->numel(), 0.0);
        v_.emplace_back(p->numel(), 0.0);
    }
}

void AdamState::step() {
    for (const auto& p : params_) {
        if (p->grad.empty()) continue;
        for (double g : p->grad) {
            if (!std::isfinite(g)) {
                throw std::runtime_error("adam: non-finite gradient, refusing poisoned update");
            }
        }
    }
    ++step_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        Tensor& p = *params_[i];
        if (p.grad.empty()) continue;  // untouched by backward: zero gradient
        for (std::size_t j = 0; j < p.data.size(); ++j) {
            const double g = p.grad[j];
            m_[i][j] = config_.beta1 * m_[i][j] + (1.0 - config_.beta1) * g;
            v_[i][j] = config_.beta2 * v_[i][j] + (1.0 - config_.beta2) * g * g;
            const double mhat = m_[i][j] / bc1;
            const double vhat = v_[i][j] / bc2;
            p.data[j] -= config_.lr * mhat / (std::sqrt(vhat) + config_.epsilon);
        }
    }
}

double clip_global_grad_norm(const std::vector<TensorPtr>& params, double max_norm) {
    double sq = 0.0;
    for (const auto& p : params) {
        for (double g : p->grad) sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double s = max_norm / norm;
        for (const auto& p : params) {
            for (double& g : p->grad) g *= s;
        }
    }
    return norm;
}

}  // namespace sgb
