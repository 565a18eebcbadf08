#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sgb/attention.hpp"
#include "sgb/rng.hpp"
#include "sgb/tensor.hpp"

namespace sgb {

struct EncoderConfig {
    std::size_t vocab_size = 0;
    std::size_t d_model = 64;
    std::size_t layers = 4;
    std::size_t heads = 4;
    std::size_t ffn_dim = 256;
    double dropout = 0.0;
    std::size_t max_len = 512;

    void validate() const;
};

struct EncoderLayerParams {
    AttentionParams attn;
    LayerNormParams ln_attn;
    FfnParams ffn;
    LayerNormParams ln_ffn;
};

struct EncoderParams {
    TensorPtr embedding;  // [vocab x d]
    std::vector<EncoderLayerParams> layers;
};

EncoderParams make_encoder(const EncoderConfig& config, Rng& rng);

struct EncoderOutput {
    // layer_states[0] is the embedding(+position) state; one entry per layer
    // after that, so layers + 1 in total. Kept so downstream representation
    // analysis never needs a second forward pass.
    std::vector<TensorPtr> layer_states;
    TensorPtr final_state;    // == layer_states.back()
    TensorPtr node_features;  // average-merged over subword spans, [n x d]
};

// Post-norm self-attention + FFN sublayers (residual then layer norm).
// `mask` may be empty.
TensorPtr self_attention_block(const TensorPtr& x, const TensorPtr& mask,
                               const EncoderLayerParams& params, double dropout_rate, Rng* dropout_rng,
                               bool training);

// Runs the full encoder over one subword id sequence. Padding ids are masked
// out of every attention so non-pad positions match the unpadded run.
// Dropout applies only when `training` and the config rate is positive;
// evaluation is deterministic.
EncoderOutput encode(const std::vector<int>& subword_ids,
                     const std::vector<std::vector<std::size_t>>& spans, const EncoderConfig& config,
                     const EncoderParams& params, bool training = false, Rng* dropout_rng = nullptr);

// Sinusoidal position table, [len x d].
TensorPtr sinusoidal_positions(std::size_t len, std::size_t d);

void collect_encoder(const std::string& prefix, const EncoderParams& params,
                     std::vector<std::pair<std::string, TensorPtr>>& out);

}  // namespace sgb
