#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgb/rng.hpp"
#include "sgb/tensor.hpp"

namespace sgb {

// Additive mask value for disallowed positions. Large enough that the
// masked exponentials underflow to exactly zero after max subtraction.
constexpr double kMaskedScore = -1e9;

struct LinearParams {
    TensorPtr w;  // [in x out]
    TensorPtr b;  // [out]
};

LinearParams make_linear(std::size_t in, std::size_t out, Rng& rng);
TensorPtr linear(const TensorPtr& x, const LinearParams& p);

struct LayerNormParams {
    TensorPtr gamma;
    TensorPtr beta;
};

LayerNormParams make_layer_norm(std::size_t dim);

struct FfnParams {
    LinearParams in;
    LinearParams out;
};

FfnParams make_ffn(std::size_t dim, std::size_t inner, Rng& rng);
// Two-layer position-wise network, LeakyReLU(0.2) inside.
TensorPtr ffn_forward(const TensorPtr& x, const FfnParams& p);

struct AttentionParams {
    LinearParams wq, wk, wv, wo;
    std::size_t heads = 1;
};

AttentionParams make_attention(std::size_t dim, std::size_t heads, Rng& rng);

struct AttentionResult {
    TensorPtr out;                    // [tq x d]
    std::vector<TensorPtr> weights;   // per head [tq x tk]
};

// Scaled dot-product attention, queries from `query_in`, keys and values
// from `memory`. `mask` is an optional constant [tq x tk] of 0/kMaskedScore
// added to the scores before softmax.
AttentionResult multi_head_attention(const TensorPtr& query_in, const TensorPtr& memory,
                                     const AttentionParams& p, const TensorPtr& mask);

// [t x t] with kMaskedScore strictly above the diagonal.
TensorPtr causal_mask(std::size_t t);

// [tq x tk] masking columns where key_is_pad is true.
TensorPtr key_padding_mask(std::size_t tq, const std::vector<bool>& key_is_pad);

void collect_linear(const std::string& prefix, const LinearParams& p,
                    std::vector<std::pair<std::string, TensorPtr>>& out);
void collect_attention(const std::string& prefix, const AttentionParams& p,
                       std::vector<std::pair<std::string, TensorPtr>>& out);
void collect_layer_norm(const std::string& prefix, const LayerNormParams& p,
                        std::vector<std::pair<std::string, TensorPtr>>& out);
void collect_ffn(const std::string& prefix, const FfnParams& p,
                 std::vector<std::pair<std::string, TensorPtr>>& out);

}  // namespace sgb
