#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sgb/adjacency.hpp"
#include "sgb/rng.hpp"
#include "sgb/tensor.hpp"

namespace sgb {

// Elementwise nonlinearity applied to each head's aggregated output.
enum class GatActivation { Identity, LeakyRelu };

// One multi-head graph attention layer. Every head owns a linear map W
// [in_dim x head_dim] and an attention vector a [2 * head_dim]; head outputs
// are concatenated, so out_dim = heads * head_dim.
struct GatLayerParams {
    std::vector<TensorPtr> w;  // per head
    std::vector<TensorPtr> a;  // per head
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    double slope = 0.2;  // LeakyReLU slope inside the attention logits
    GatActivation activation = GatActivation::Identity;
};

GatLayerParams make_gat_layer(std::size_t in_dim, std::size_t out_dim, std::size_t heads, Rng& rng,
                              GatActivation activation, double slope = 0.2);

struct GatStack {
    std::vector<GatLayerParams> layers;

    std::size_t input_dim() const { return layers.front().in_dim; }
    std::size_t output_dim() const { return layers.back().out_dim; }
};

// `depth` layers from in_dim to out_dim through `hidden_dim`. Hidden layers
// use LeakyReLU(0.2); the final layer is linear.
GatStack make_gat_stack(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim,
                        std::size_t depth, std::size_t heads, Rng& rng);

// Per-head attention matrices [n x n]: softmax over each node's 1-hop
// neighborhood of LeakyReLU(a^T [W x_i || W x_j]). Non-neighbor entries are
// exactly zero. Throws if any node has an empty neighborhood (the diagonal
// self-loops normally rule this out).
std::vector<TensorPtr> attention_coefficients(const TensorPtr& x, const Adjacency& adjacency,
                                              const GatLayerParams& params);

TensorPtr gat_layer_forward(const TensorPtr& x, const Adjacency& adjacency,
                            const GatLayerParams& params);

TensorPtr gat_stack_forward(const TensorPtr& x, const Adjacency& adjacency, const GatStack& stack);

void collect_gat(const std::string& prefix, const GatStack& stack,
                 std::vector<std::pair<std::string, TensorPtr>>& out);

}  // namespace sgb
