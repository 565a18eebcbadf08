#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "sgb/rng.hpp"

namespace sgb {

class Tensor;
using TensorPtr = std::shared_ptr<Tensor>;
using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

// Per-traversal adjoint buffers. Keeping them out of the tensors means each
// backward() call computes one full, independent pass and then adds it into
// Tensor::grad, so two passes accumulate exactly twice one pass.
class AdjointMap {
public:
    // Zero-initialized buffer of t's element count, created on first use.
    std::vector<double>& buffer(const Tensor* t);
    const std::vector<double>* find(const Tensor* t) const;

private:
    std::unordered_map<const Tensor*, std::vector<double>> buffers_;
};

// Dense row-major tensor of 64-bit floats with reverse-mode gradient tape
// participation. Interior nodes hold shared_ptr links to their inputs plus a
// closure that routes upstream adjoints to them; backward() walks that graph
// in reverse topological order.
//
// Rank conventions: rank 1 for vectors (biases, attention vectors), rank 2
// for matrices. There is no general broadcasting; add_row() is the one
// batch-style expansion.
class Tensor : public std::enable_shared_from_this<Tensor> {
public:
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad;  // allocated lazily; same size as data once present
    bool requires_grad = false;

    std::vector<TensorPtr> parents;
    std::function<void(const std::vector<double>& upstream, AdjointMap& adj)> backward_fn;

    Tensor() = default;
    Tensor(Shape s, std::vector<double> values);

    static TensorPtr of(Shape s, std::vector<double> values, bool requires_grad = false);
    static TensorPtr zeros(Shape s, bool requires_grad = false);
    static TensorPtr full(Shape s, double value, bool requires_grad = false);
    static TensorPtr scalar(double value, bool requires_grad = false);
    static TensorPtr uniform(Shape s, Rng& rng, double lo, double hi, bool requires_grad = false);
    // Glorot/Xavier uniform over a rank-2 shape (rows = fan_out of a right-multiplied map).
    static TensorPtr xavier(Shape s, Rng& rng, bool requires_grad = false);

    std::size_t numel() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }
    bool is_scalar() const { return data.size() == 1; }

    std::size_t rows() const;
    std::size_t cols() const;
    double& at(std::size_t i, std::size_t j);
    double at(std::size_t i, std::size_t j) const;

    void ensure_grad();
    void zero_grad();
};

// Seeds d(loss)/d(loss) = 1 and accumulates d(loss)/d(t) into t->grad for
// every tensor on the path that requires grad. Throws if loss is not scalar.
void backward(const TensorPtr& loss);

void zero_all_grads(const std::vector<TensorPtr>& params);

// ---------------------------------------------------------------------------
// Ops. Each produces a fresh node; gradient tracking engages only when an
// input requires grad.
// ---------------------------------------------------------------------------

TensorPtr add(const TensorPtr& a, const TensorPtr& b);
TensorPtr sub(const TensorPtr& a, const TensorPtr& b);
TensorPtr mul(const TensorPtr& a, const TensorPtr& b);  // elementwise
TensorPtr scale(const TensorPtr& a, double c);
TensorPtr neg(const TensorPtr& a);

// x: [s x d], bias: [d]; adds bias to every row.
TensorPtr add_row(const TensorPtr& x, const TensorPtr& bias);

TensorPtr matmul(const TensorPtr& a, const TensorPtr& b);
TensorPtr transpose(const TensorPtr& a);

TensorPtr leaky_relu(const TensorPtr& x, double slope);

// Stabilized by max subtraction. axis 0 = down columns, 1 = along rows;
// rank-1 tensors use axis 0.
TensorPtr softmax(const TensorPtr& x, int axis);
TensorPtr log_softmax_rows(const TensorPtr& x);

// Per-row normalization with learnable gain/shift, biased variance.
TensorPtr layer_norm_rows(const TensorPtr& x, const TensorPtr& gamma, const TensorPtr& beta,
                          double eps = 1e-5);

TensorPtr concat_rows(const std::vector<TensorPtr>& parts);
TensorPtr concat_cols(const std::vector<TensorPtr>& parts);
TensorPtr slice_rows(const TensorPtr& x, std::size_t start, std::size_t count);
TensorPtr slice_cols(const TensorPtr& x, std::size_t start, std::size_t count);

// Embedding lookup: one output row per id; gradients scatter-add into table.
TensorPtr gather_rows(const TensorPtr& table, const std::vector<int>& ids);

TensorPtr sum_all(const TensorPtr& x);
TensorPtr mean_all(const TensorPtr& x);

// Mean negative log-likelihood of log_probs[i, targets[i]] over rows whose
// target is not ignore_id. Throws if every row is ignored.
TensorPtr nll_mean(const TensorPtr& log_probs, const std::vector<int>& targets, int ignore_id);

// Inverted dropout; identity when not training or rate == 0.
TensorPtr dropout(const TensorPtr& x, double rate, Rng& rng, bool training);

}  // namespace sgb
