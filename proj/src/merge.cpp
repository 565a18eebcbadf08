#include "sgb/merge.hpp"

#include <stdexcept>

namespace sgb {

TensorPtr build_merge_matrix(const std::vector<std::vector<std::size_t>>& spans,
                             std::size_t subword_count) {
    auto m = Tensor::zeros({spans.size(), subword_count});
    for (std::size_t i = 0; i < spans.size(); ++i) {
        if (spans[i].empty()) {
            throw std::invalid_argument("merge: empty subword span for token " + std::to_string(i));
        }
        const double w = 1.0 / static_cast<double>(spans[i].size());
        for (std::size_t pos : spans[i]) {
            if (pos >= subword_count) {
                throw std::invalid_argument("merge: span index " + std::to_string(pos) +
                                            " out of range");
            }
            m->data[i * subword_count + pos] = w;
        }
    }
    return m;
}

TensorPtr merge_subword_embeddings(const TensorPtr& subword_states,
                                   const std::vector<std::vector<std::size_t>>& spans) {
    return matmul(build_merge_matrix(spans, subword_states->rows()), subword_states);
}

}  // namespace sgb
