#pragma once

#include <cstddef>
#include <vector>

#include "sgb/tensor.hpp"

namespace sgb {

// Constant [n x s] averaging matrix: row i holds 1/|span_i| on the subword
// positions of token i and 0 elsewhere (special markers get no weight).
TensorPtr build_merge_matrix(const std::vector<std::vector<std::size_t>>& spans,
                             std::size_t subword_count);

// Average-merges subword states [s x d] into one row per token [n x d].
// Implemented as a constant matmul, so each subword in a span receives
// 1/|span| of the node's gradient. Throws on an empty span or a span index
// outside the state rows.
TensorPtr merge_subword_embeddings(const TensorPtr& subword_states,
                                   const std::vector<std::vector<std::size_t>>& spans);

}  // namespace sgb
