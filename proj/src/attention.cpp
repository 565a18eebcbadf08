#include "sgb/attention.hpp"

#include <cmath>
#include <stdexcept>

namespace sgb {

LinearParams make_linear(std::size_t in, std::size_t out, Rng& rng) {
    return {Tensor::xavier({in, out}, rng, true), Tensor::zeros({out}, true)};
}

TensorPtr linear(const TensorPtr& x, const LinearParams& p) {
    return add_row(matmul(x, p.w), p.b);
}

LayerNormParams make_layer_norm(std::size_t dim) {
    return {Tensor::full({dim}, 1.0, true), Tensor::zeros({dim}, true)};
}

FfnParams make_ffn(std::size_t dim, std::size_t inner, Rng& rng) {
    return {make_linear(dim, inner, rng), make_linear(inner, dim, rng)};
}

TensorPtr ffn_forward(const TensorPtr& x, const FfnParams& p) {
    return linear(leaky_relu(linear(x, p.in), 0.2), p.out);
}

AttentionParams make_attention(std::size_t dim, std::size_t heads, Rng& rng) {
    if (heads == 0 || dim % heads != 0) {
        throw std::invalid_argument("attention: model dim must be divisible by head count");
    }
    return {make_linear(dim, dim, rng), make_linear(dim, dim, rng), make_linear(dim, dim, rng),
            make_linear(dim, dim, rng), heads};
}

AttentionResult multi_head_attention(const TensorPtr& query_in, const TensorPtr& memory,
                                     const AttentionParams& p, const TensorPtr& mask) {
    const std::size_t d = p.wq.w->cols();
    if (query_in->cols() != p.wq.w->rows() || memory->cols() != p.wk.w->rows()) {
        throw std::invalid_argument("attention: input width does not match projections");
    }
    const std::size_t head_dim = d / p.heads;
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));

    TensorPtr q = linear(query_in, p.wq);
    TensorPtr k = linear(memory, p.wk);
    TensorPtr v = linear(memory, p.wv);

    AttentionResult result;
    std::vector<TensorPtr> contexts;
    contexts.reserve(p.heads);
    for (std::size_t h = 0; h < p.heads; ++h) {
        TensorPtr qh = slice_cols(q, h * head_dim, head_dim);
        TensorPtr kh = slice_cols(k, h * head_dim, head_dim);
        TensorPtr vh = slice_cols(v, h * head_dim, head_dim);
        TensorPtr scores = scale(matmul(qh, transpose(kh)), inv_sqrt);
        if (mask) scores = add(scores, mask);
        TensorPtr weights = softmax(scores, 1);
        result.weights.push_back(weights);
        contexts.push_back(matmul(weights, vh));
    }
    result.out = linear(p.heads == 1 ? contexts[0] : concat_cols(contexts), p.wo);
    return result;
}

TensorPtr causal_mask(std::size_t t) {
    auto m = Tensor::zeros({t, t});
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = i + 1; j < t; ++j) m->data[i * t + j] = kMaskedScore;
    return m;
}

TensorPtr key_padding_mask(std::size_t tq, const std::vector<bool>& key_is_pad) {
    const std::size_t tk = key_is_pad.size();
    auto m = Tensor::zeros({tq, tk});
    for (std::size_t j = 0; j < tk; ++j) {
        if (!key_is_pad[j]) continue;
        for (std::size_t i = 0; i < tq; ++i) m->data[i * tk + j] = kMaskedScore;
    }
    return m;
}

void collect_linear(const std::string& prefix, const LinearParams& p,
                    std::vector<std::pair<std::string, TensorPtr>>& out) {
    out.emplace_back(prefix + ".w", p.w);
    out.emplace_back(prefix + ".b", p.b);
}

void collect_attention(const std::string& prefix, const AttentionParams& p,
                       std::vector<std::pair<std::string, TensorPtr>>& out) {
    collect_linear(prefix + ".q", p.wq, out);
    collect_linear(prefix + ".k", p.wk, out);
    collect_linear(prefix + ".v", p.wv, out);
    collect_linear(prefix + ".o", p.wo, out);
}

void collect_layer_norm(const std::string& prefix, const LayerNormParams& p,
                        std::vector<std::pair<std::string, TensorPtr>>& out) {
    out.emplace_back(prefix + ".gamma", p.gamma);
    out.emplace_back(prefix + ".beta", p.beta);
}

void collect_ffn(const std::string& prefix, const FfnParams& p,
                 std::vector<std::pair<std::string, TensorPtr>>& out) {
    collect_linear(prefix + ".in", p.in, out);
    collect_linear(prefix + ".out", p.out, out);
}

}  // namespace sgb
