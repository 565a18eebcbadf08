#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sgb/rng.hpp"
#include "sgb/tensor.hpp"

namespace sgb {

struct GradCheckResult {
    double max_error = 0.0;  // worst |analytic - numeric| / max(1, |analytic|, |numeric|)
    std::string worst_param;
    std::size_t worst_index = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;

    bool pass(double tol) const { return max_error < tol; }
};

// Central finite-difference gradient oracle. `make_loss` must rebuild the
// scalar loss from the current contents of `params` on every call; the oracle
// only evaluates forward values, so it stays independent of the tape.
//
// coords_per_param == 0 checks every coordinate; otherwise that many
// coordinates per tensor are sampled with `coord_rng` (required then).
GradCheckResult check_gradients(const std::function<TensorPtr()>& make_loss,
                                const std::vector<std::pair<std::string, TensorPtr>>& params,
                                double h = 1e-5, std::size_t coords_per_param = 0,
                                Rng* coord_rng = nullptr);

}  // namespace sgb
