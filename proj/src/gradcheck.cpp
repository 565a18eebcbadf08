#include "sgb/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgb {

GradCheckResult check_gradients(const std::function<TensorPtr()>& make_loss,
                                const std::vector<std::pair<std::string, TensorPtr>>& params,
                                double h, std::size_t coords_per_param, Rng* coord_rng) {
    if (coords_per_param > 0 && coord_rng == nullptr) {
        throw std::invalid_argument("check_gradients: sampling requires a coordinate rng");
    }

    for (const auto& [name, p] : params) p->zero_grad();
    TensorPtr loss = make_loss();
    backward(loss);

    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (const auto& [name, p] : params) {
        p->ensure_grad();
        analytic.push_back(p->grad);
    }

    GradCheckResult result;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        TensorPtr p = params[pi].second;
        std::vector<std::size_t> coords;
        if (coords_per_param == 0 || coords_per_param >= p->numel()) {
            coords.resize(p->numel());
            for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
        } else {
            for (std::size_t c = 0; c < coords_per_param; ++c) coords.push_back(coord_rng->index(p->numel()));
        }
        for (std::size_t idx : coords) {
            const double saved = p->data[idx];
            p->data[idx] = saved + h;
            const double fp = make_loss()->data[0];
            p->data[idx] = saved - h;
            const double fm = make_loss()->data[0];
            p->data[idx] = saved;
            const double numeric = (fp - fm) / (2.0 * h);
            const double a = analytic[pi][idx];
            const double err = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
            if (err > result.max_error) {
                result.max_error = err;
                result.worst_param = params[pi].first;
                result.worst_index = idx;
                result.worst_analytic = a;
                result.worst_numeric = numeric;
            }
        }
    }
    return result;
}

}  // namespace sgb
