#include "sgb/gat.hpp"

#include <stdexcept>

#include "sgb/attention.hpp"

namespace sgb {

namespace {

TensorPtr neighborhood_mask(const Adjacency& adjacency) {
    const std::size_t n = adjacency.n;
    auto mask = Tensor::zeros({n, n});
    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::size_t j = 0; j < n; ++j) {
            if (adjacency.at(i, j)) {
                any = true;
            } else {
                mask->data[i * n + j] = kMaskedScore;
            }
        }
        if (!any) {
            throw std::invalid_argument("gat: node " + std::to_string(i) +
                                        " has an empty neighborhood");
        }
    }
    return mask;
}

struct HeadForward {
    TensorPtr alpha;       // [n x n]
    TensorPtr projected;   // W x, [n x head_dim]
};

HeadForward head_forward(const TensorPtr& x, const TensorPtr& mask, const TensorPtr& w,
                         const TensorPtr& a, double slope) {
    const std::size_t n = x->rows();
    const std::size_t head_dim = w->cols();
    TensorPtr z = matmul(x, w);
    // e_ij = LeakyReLU(a1 . z_i + a2 . z_j), realized as an outer sum.
    TensorPtr u = matmul(z, slice_rows(a, 0, head_dim));         // [n x 1]
    TensorPtr v = matmul(z, slice_rows(a, head_dim, head_dim));  // [n x 1]
    TensorPtr ones = Tensor::full({n, 1}, 1.0);
    TensorPtr e = add(matmul(u, transpose(ones)), matmul(ones, transpose(v)));
    e = leaky_relu(e, slope);
    return {softmax(add(e, mask), 1), z};
}

}  // namespace

GatLayerParams make_gat_layer(std::size_t in_dim, std::size_t out_dim, std::size_t heads, Rng& rng,
                              GatActivation activation, double slope) {
    if (heads == 0 || out_dim % heads != 0) {
        throw std::invalid_argument("gat: out_dim must be divisible by head count");
    }
    const std::size_t head_dim = out_dim / heads;
    GatLayerParams p;
    p.in_dim = in_dim;
    p.out_dim = out_dim;
    p.slope = slope;
    p.activation = activation;
    for (std::size_t h = 0; h < heads; ++h) {
        p.w.push_back(Tensor::xavier({in_dim, head_dim}, rng, true));
        p.a.push_back(Tensor::uniform({2 * head_dim, 1}, rng, -0.3, 0.3, true));
    }
    return p;
}

GatStack make_gat_stack(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim,
                        std::size_t depth, std::size_t heads, Rng& rng) {
    if (depth == 0) throw std::invalid_argument("gat: stack depth must be >= 1");
    GatStack stack;
    std::size_t dim = in_dim;
    for (std::size_t l = 0; l < depth; ++l) {
        const bool last = l + 1 == depth;
        const std::size_t next = last ? out_dim : hidden_dim;
        stack.layers.push_back(make_gat_layer(
            dim, next, heads, rng, last ? GatActivation::Identity : GatActivation::LeakyRelu));
        dim = next;
    }
    return stack;
}

std::vector<TensorPtr> attention_coefficients(const TensorPtr& x, const Adjacency& adjacency,
                                              const GatLayerParams& params) {
    if (x->rank() != 2 || x->rows() != adjacency.n || x->cols() != params.in_dim) {
        throw std::invalid_argument("gat: features must be [n x in_dim] matching the adjacency");
    }
    TensorPtr mask = neighborhood_mask(adjacency);
    std::vector<TensorPtr> alphas;
    alphas.reserve(params.w.size());
    for (std::size_t h = 0; h < params.w.size(); ++h) {
        alphas.push_back(head_forward(x, mask, params.w[h], params.a[h], params.slope).alpha);
    }
    return alphas;
}

TensorPtr gat_layer_forward(const TensorPtr& x, const Adjacency& adjacency,
                            const GatLayerParams& params) {
    if (x->rank() != 2 || x->rows() != adjacency.n || x->cols() != params.in_dim) {
        throw std::invalid_argument("gat: features must be [n x in_dim] matching the adjacency");
    }
    TensorPtr mask = neighborhood_mask(adjacency);
    std::vector<TensorPtr> heads;
    heads.reserve(params.w.size());
    for (std::size_t h = 0; h < params.w.size(); ++h) {
        HeadForward f = head_forward(x, mask, params.w[h], params.a[h], params.slope);
        TensorPtr aggregated = matmul(f.alpha, f.projected);
        if (params.activation == GatActivation::LeakyRelu) {
            aggregated = leaky_relu(aggregated, params.slope);
        }
        heads.push_back(aggregated);
    }
    return heads.size() == 1 ? heads[0] : concat_cols(heads);
}

TensorPtr gat_stack_forward(const TensorPtr& x, const Adjacency& adjacency, const GatStack& stack) {
    if (stack.layers.empty()) throw std::invalid_argument("gat: empty stack");
    TensorPtr h = x;
    for (const GatLayerParams& layer : stack.layers) h = gat_layer_forward(h, adjacency, layer);
    return h;
}

void collect_gat(const std::string& prefix, const GatStack& stack,
                 std::vector<std::pair<std::string, TensorPtr>>& out) {
    for (std::size_t l = 0; l < stack.layers.size(); ++l) {
        const GatLayerParams& layer = stack.layers[l];
        for (std::size_t h = 0; h < layer.w.size(); ++h) {
            const std::string base = prefix + ".layer" + std::to_string(l) + ".head" + std::to_string(h);
            out.emplace_back(base + ".w", layer.w[h]);
            out.emplace_back(base + ".a", layer.a[h]);
        }
    }
}

}  // namespace sgb
