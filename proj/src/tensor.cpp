#include "sgb/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace sgb {

std::string shape_to_string(const Shape& shape) {
    std::string out = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out += "x";
        out += std::to_string(shape[i]);
    }
    out += ")";
    return out;
}

std::size_t shape_numel(const Shape& shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    return n;
}

std::vector<double>& AdjointMap::buffer(const Tensor* t) {
    auto it = buffers_.find(t);
    if (it == buffers_.end()) {
        it = buffers_.emplace(t, std::vector<double>(t->numel(), 0.0)).first;
    }
    return it->second;
}

const std::vector<double>* AdjointMap::find(const Tensor* t) const {
    auto it = buffers_.find(t);
    return it == buffers_.end() ? nullptr : &it->second;
}

Tensor::Tensor(Shape s, std::vector<double> values) : shape(std::move(s)), data(std::move(values)) {
    if (shape_numel(shape) != data.size()) {
        throw std::invalid_argument("tensor: shape " + shape_to_string(shape) + " does not match " +
                                    std::to_string(data.size()) + " values");
    }
}

TensorPtr Tensor::of(Shape s, std::vector<double> values, bool requires_grad) {
    auto t = std::make_shared<Tensor>(std::move(s), std::move(values));
    t->requires_grad = requires_grad;
    return t;
}

TensorPtr Tensor::zeros(Shape s, bool requires_grad) {
    std::size_t n = shape_numel(s);
    return of(std::move(s), std::vector<double>(n, 0.0), requires_grad);
}

TensorPtr Tensor::full(Shape s, double value, bool requires_grad) {
    std::size_t n = shape_numel(s);
    return of(std::move(s), std::vector<double>(n, value), requires_grad);
}

TensorPtr Tensor::scalar(double value, bool requires_grad) {
    return of({1}, {value}, requires_grad);
}

TensorPtr Tensor::uniform(Shape s, Rng& rng, double lo, double hi, bool requires_grad) {
    std::size_t n = shape_numel(s);
    std::vector<double> values(n);
    for (auto& v : values) v = rng.uniform(lo, hi);
    return of(std::move(s), std::move(values), requires_grad);
}

TensorPtr Tensor::xavier(Shape s, Rng& rng, bool requires_grad) {
    if (s.size() != 2) throw std::invalid_argument("xavier: rank-2 shape required");
    const double limit = std::sqrt(6.0 / static_cast<double>(s[0] + s[1]));
    return uniform(std::move(s), rng, -limit, limit, requires_grad);
}

std::size_t Tensor::rows() const {
    if (shape.empty()) throw std::invalid_argument("rows: rank-0 tensor");
    return shape[0];
}

std::size_t Tensor::cols() const {
    if (shape.size() != 2) throw std::invalid_argument("cols: rank-2 tensor required, got " + shape_to_string(shape));
    return shape[1];
}

double& Tensor::at(std::size_t i, std::size_t j) {
    return data[i * cols() + j];
}

double Tensor::at(std::size_t i, std::size_t j) const {
    return data[i * cols() + j];
}

void Tensor::ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
}

void Tensor::zero_grad() {
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
}

void zero_all_grads(const std::vector<TensorPtr>& params) {
    for (const auto& p : params) p->zero_grad();
}

namespace {

// Iterative post-order DFS over parent links.
std::vector<Tensor*> topo_order(Tensor* root) {
    std::vector<Tensor*> order;
    std::unordered_set<Tensor*> visited;
    std::vector<std::pair<Tensor*, std::size_t>> stack;
    stack.emplace_back(root, 0);
    visited.insert(root);
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Tensor* child = node->parents[next].get();
            ++next;
            if (visited.insert(child).second) {
                stack.emplace_back(child, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
    return order;  // children before parents-of-graph; root last
}

bool track(const TensorPtr& a) { return a->requires_grad; }
bool track(const TensorPtr& a, const TensorPtr& b) { return a->requires_grad || b->requires_grad; }

void require_same_shape(const TensorPtr& a, const TensorPtr& b, const char* op) {
    if (a->shape != b->shape) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_to_string(a->shape) +
                                    " vs " + shape_to_string(b->shape));
    }
}

}  // namespace

void backward(const TensorPtr& loss) {
    if (!loss || loss->numel() != 1) {
        throw std::invalid_argument("backward: loss must be a scalar tensor");
    }
    std::vector<Tensor*> order = topo_order(loss.get());
    AdjointMap adj;
    adj.buffer(loss.get())[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Tensor* node = *it;
        const std::vector<double>* upstream = adj.find(node);
        if (!upstream || !node->backward_fn) continue;
        node->backward_fn(*upstream, adj);
    }
    for (Tensor* node : order) {
        if (!node->requires_grad) continue;
        const std::vector<double>* buf = adj.find(node);
        if (!buf) continue;
        node->ensure_grad();
        for (std::size_t i = 0; i < buf->size(); ++i) node->grad[i] += (*buf)[i];
    }
}

// ---------------------------------------------------------------------------
// elementwise
// ---------------------------------------------------------------------------

TensorPtr add(const TensorPtr& a, const TensorPtr& b) {
    require_same_shape(a, b, "add");
    auto out = Tensor::zeros(a->shape);
    for (std::size_t i = 0; i < a->numel(); ++i) out->data[i] = a->data[i] + b->data[i];
    if (track(a, b)) {
        out->requires_grad = true;
        out->parents = {a, b};
        out->backward_fn = [a, b](const std::vector<double>& up, AdjointMap& adj) {
            if (a->requires_grad) {
                auto& ga = adj.buffer(a.get());
                for (std::size_t i = 0; i < up.size(); ++i) ga[i] += up[i];
            }
            if (b->requires_grad) {
                auto& gb = adj.buffer(b.get());
                for (std::size_t i = 0; i < up.size(); ++i) gb[i] += up[i];
            }
        };
    }
    return out;
}

TensorPtr sub(const TensorPtr& a, const TensorPtr& b) {
    require_same_shape(a, b, "sub");
    auto out = Tensor::zeros(a->shape);
    for (std::size_t i = 0; i < a->numel(); ++i) out->data[i] = a->data[i] - b->data[i];
    if (track(a, b)) {
        out->requires_grad = true;
        out->parents = {a, b};
        out->backward_fn = [a, b](const std::vector<double>& up, AdjointMap& adj) {
            if (a->requires_grad) {
                auto& ga = adj.buffer(a.get());
                for (std::size_t i = 0; i < up.size(); ++i) ga[i] += up[i];
            }
            if (b->requires_grad) {
                auto& gb = adj.buffer(b.get());
                for (std::size_t i = 0; i < up.size(); ++i) gb[i] -= up[i];
            }
        };
    }
    return out;
}

TensorPtr mul(const TensorPtr& a, const TensorPtr& b) {
    require_same_shape(a, b, "mul");
    auto out = Tensor::zeros(a->shape);
    for (std::size_t i = 0; i < a->numel(); ++i) out->data[i] = a->data[i] * b->data[i];
    if (track(a, b)) {
        out->requires_grad = true;
        out->parents = {a, b};
        out->backward_fn = [a, b](const std::vector<double>& up, AdjointMap& adj) {
            if (a->requires_grad) {
                auto& ga = adj.buffer(a.get());
                for (std::size_t i = 0; i < up.size(); ++i) ga[i] += up[i] * b->data[i];
            }
            if (b->requires_grad) {
                auto& gb = adj.buffer(b.get());
                for (std::size_t i = 0; i < up.size(); ++i) gb[i] += up[i] * a->data[i];
            }
        };
    }
    return out;
}

TensorPtr scale(const TensorPtr& a, double c) {
    auto out = Tensor::zeros(a->shape);
    for (std::size_t i = 0; i < a->numel(); ++i) out->data[i] = a->data[i] * c;
    if (track(a)) {
        out->requires_grad = true;
        out->parents = {a};
        out->backward_fn = [a, c](const std::vector<double>& up, AdjointMap& adj) {
            auto& ga = adj.buffer(a.get());
            for (std::size_t i = 0; i < up.size(); ++i) ga[i] += up[i] * c;
        };
    }
    return out;
}

TensorPtr neg(const TensorPtr& a) { return scale(a, -1.0); }

TensorPtr add_row(const TensorPtr& x, const TensorPtr& bias) {
    if (x->rank() != 2 || bias->rank() != 1 || bias->shape[0] != x->cols()) {
        throw std::invalid_argument("add_row: need [s x d] + [d], got " + shape_to_string(x->shape) +
                                    " + " + shape_to_string(bias->shape));
    }
    const std::size_t s = x->rows(), d = x->cols();
    auto out = Tensor::zeros(x->shape);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < d; ++j) out->data[i * d + j] = x->data[i * d + j] + bias->data[j];
    if (track(x, bias)) {
        out->requires_grad = true;
        out->parents = {x, bias};
        out->backward_fn = [x, bias, s, d](const std::vector<double>& up, AdjointMap& adj) {
            if (x->requires_grad) {
                auto& gx = adj.buffer(x.get());
                for (std::size_t i = 0; i < up.size(); ++i) gx[i] += up[i];
            }
            if (bias->requires_grad) {
                auto& gb = adj.buffer(bias.get());
                for (std::size_t i = 0; i < s; ++i)
                    for (std::size_t j = 0; j < d; ++j) gb[j] += up[i * d + j];
            }
        };
    }
    return out;
}

// ---------------------------------------------------------------------------
// linear algebra
// ---------------------------------------------------------------------------

TensorPtr matmul(const TensorPtr& a, const TensorPtr& b) {
    if (a->rank() != 2 || b->rank() != 2) {
        throw std::invalid_argument("matmul: rank-2 operands required, got " +
                                    shape_to_string(a->shape) + " and " + shape_to_string(b->shape));
    }
    if (a->cols() != b->rows()) {
        throw std::invalid_argument("matmul: inner dimensions differ, " + shape_to_string(a->shape) +
                                    " x " + shape_to_string(b->shape));
    }
    const std::size_t m = a->rows(), k = a->cols(), n = b->cols();
    auto out = Tensor::zeros({m, n});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a->data[i * k + p];
            if (av == 0.0) continue;
            const double* brow = &b->data[p * n];
            double* orow = &out->data[i * n];
            for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
    if (track(a, b)) {
        out->requires_grad = true;
        out->parents = {a, b};
        out->backward_fn = [a, b, m, k, n](const std::vector<double>& up, AdjointMap& adj) {
            if (a->requires_grad) {
                auto& ga = adj.buffer(a.get());  // up [m x n] * b^T [n x k]
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) {
                        const double u = up[i * n + j];
                        if (u == 0.0) continue;
                        for (std::size_t p = 0; p < k; ++p) ga[i * k + p] += u * b->data[p * n + j];
                    }
            }
            if (b->requires_grad) {
                auto& gb = adj.buffer(b.get());  // a^T [k x m] * up [m x n]
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t p = 0; p < k; ++p) {
                        const double av = a->data[i * k + p];
                        if (av == 0.0) continue;
                        for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += av * up[i * n + j];
                    }
            }
        };
    }
    return out;
}

TensorPtr transpose(const TensorPtr& a) {
    if (a->rank() != 2) throw std::invalid_argument("transpose: rank-2 tensor required");
    const std::size_t m = a->rows(), n = a->cols();
    auto out = Tensor::zeros({n, m});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out->data[j * m + i] = a->data[i * n + j];
    if (track(a)) {
        out->requires_grad = true;
        out->parents = {a};
        out->backward_fn = [a, m, n](const std::vector<double>& up, AdjointMap& adj) {
            auto& ga = adj.buffer(a.get());
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += up[j * m + i];
        };
    }
    return out;
}

// ---------------------------------------------------------------------------
// nonlinearities
// ---------------------------------------------------------------------------

TensorPtr leaky_relu(const TensorPtr& x, double slope) {
    if (slope < 0.0) throw std::invalid_argument("leaky_relu: slope must be >= 0");
    auto out = Tensor::zeros(x->shape);
    for (std::size_t i = 0; i < x->numel(); ++i) {
        const double v = x->data[i];
        out->data[i] = v >= 0.0 ? v : slope * v;
    }
    if (track(x)) {
        out->requires_grad = true;
        out->parents = {x};
        out->backward_fn = [x, slope](const std::vector<double>& up, AdjointMap& adj) {
            auto& gx = adj.buffer(x.get());
            for (std::size_t i = 0; i < up.size(); ++i) {
                gx[i] += up[i] * (x->data[i] >= 0.0 ? 1.0 : slope);
            }
        };
    }
    return out;
}

namespace {

// Softmax over contiguous or strided lanes. lanes = number of independent
// softmaxes, lane_len = elements per softmax, stride between lane elements.
void softmax_lanes(const std::vector<double>& in, std::vector<double>& out, std::size_t lanes,
                   std::size_t lane_len, std::size_t lane_start_stride, std::size_t elem_stride) {
    for (std::size_t l = 0; l < lanes; ++l) {
        const std::size_t base = l * lane_start_stride;
        double mx = in[base];
        for (std::size_t j = 1; j < lane_len; ++j) mx = std::max(mx, in[base + j * elem_stride]);
        double sum = 0.0;
        for (std::size_t j = 0; j < lane_len; ++j) {
            const double e = std::exp(in[base + j * elem_stride] - mx);
            out[base + j * elem_stride] = e;
            sum += e;
        }
        for (std::size_t j = 0; j < lane_len; ++j) out[base + j * elem_stride] /= sum;
    }
}

}  // namespace

TensorPtr softmax(const TensorPtr& x, int axis) {
    if (x->rank() == 0 || x->rank() > 2) {
        throw std::invalid_argument("softmax: rank-1 or rank-2 tensor required");
    }
    std::size_t lanes, lane_len, lane_stride, elem_stride;
    if (x->rank() == 1) {
        if (axis != 0) throw std::invalid_argument("softmax: axis out of range for rank-1 tensor");
        lanes = 1;
        lane_len = x->shape[0];
        lane_stride = 0;
        elem_stride = 1;
    } else if (axis == 1) {
        lanes = x->rows();
        lane_len = x->cols();
        lane_stride = x->cols();
        elem_stride = 1;
    } else if (axis == 0) {
        lanes = x->cols();
        lane_len = x->rows();
        lane_stride = 1;
        elem_stride = x->cols();
    } else {
        throw std::invalid_argument("softmax: axis out of range");
    }
    if (lane_len == 0) throw std::invalid_argument("softmax: empty axis");

    auto out = Tensor::zeros(x->shape);
    softmax_lanes(x->data, out->data, lanes, lane_len, lane_stride, elem_stride);

    if (track(x)) {
        out->requires_grad = true;
        out->parents = {x};
        auto self = out;
        out->backward_fn = [x, self, lanes, lane_len, lane_stride, elem_stride](
                               const std::vector<double>& up, AdjointMap& adj) {
            auto& gx = adj.buffer(x.get());
            for (std::size_t l = 0; l < lanes; ++l) {
                const std::size_t base = l * lane_stride;
                double dot = 0.0;
                for (std::size_t j = 0; j < lane_len; ++j) {
                    const std::size_t idx = base + j * elem_stride;
                    dot += up[idx] * self->data[idx];
                }
                for (std::size_t j = 0; j < lane_len; ++j) {
                    const std::size_t idx = base + j * elem_stride;
                    gx[idx] += self->data[idx] * (up[idx] - dot);
                }
            }
        };
    }
    return out;
}

TensorPtr log_softmax_rows(const TensorPtr& x) {
    if (x->rank() != 2) throw std::invalid_argument("log_softmax_rows: rank-2 tensor required");
    const std::size_t m = x->rows(), n = x->cols();
    if (n == 0) throw std::invalid_argument("log_softmax_rows: empty rows");
    auto out = Tensor::zeros(x->shape);
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = &x->data[i * n];
        double mx = row[0];
        for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, row[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) sum += std::exp(row[j] - mx);
        const double lse = mx + std::log(sum);
        for (std::size_t j = 0; j < n; ++j) out->data[i * n + j] = row[j] - lse;
    }
    if (track(x)) {
        out->requires_grad = true;
        out->parents = {x};
        auto self = out;
        out->backward_fn = [x, self, m, n](const std::vector<double>& up, AdjointMap& adj) {
            auto& gx = adj.buffer(x.get());
            for (std::size_t i = 0; i < m; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += up[i * n + j];
                for (std::size_t j = 0; j < n; ++j) {
                    gx[i * n + j] += up[i * n + j] - std::exp(self->data[i * n + j]) * s;
                }
            }
        };
    }
    return out;
}

TensorPtr layer_norm_rows(const TensorPtr& x, const TensorPtr& gamma, const TensorPtr& beta,
                          double eps) {
    if (x->rank() != 2) throw std::invalid_argument("layer_norm_rows: rank-2 input required");
    const std::size_t m = x->rows(), n = x->cols();
    if (gamma->shape != Shape{n} || beta->shape != Shape{n}) {
        throw std::invalid_argument("layer_norm_rows: gamma/beta must be [" + std::to_string(n) + "]");
    }
    auto out = Tensor::zeros(x->shape);
    // Cache per-row inv-std and normalized values for backward.
    auto xhat = std::make_shared<std::vector<double>>(m * n);
    auto inv_std = std::make_shared<std::vector<double>>(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = &x->data[i * n];
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) mean += row[j];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = row[j] - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        const double inv = 1.0 / std::sqrt(var + eps);
        (*inv_std)[i] = inv;
        for (std::size_t j = 0; j < n; ++j) {
            const double h = (row[j] - mean) * inv;
            (*xhat)[i * n + j] = h;
            out->data[i * n + j] = gamma->data[j] * h + beta->data[j];
        }
    }
    if (track(x, gamma) || beta->requires_grad) {
        out->requires_grad = true;
        out->parents = {x, gamma, beta};
        out->backward_fn = [x, gamma, beta, xhat, inv_std, m, n](const std::vector<double>& up,
                                                                 AdjointMap& adj) {
            if (gamma->requires_grad) {
                auto& gg = adj.buffer(gamma.get());
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) gg[j] += up[i * n + j] * (*xhat)[i * n + j];
            }
            if (beta->requires_grad) {
                auto& gb = adj.buffer(beta.get());
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) gb[j] += up[i * n + j];
            }
            if (x->requires_grad) {
                auto& gx = adj.buffer(x.get());
                for (std::size_t i = 0; i < m; ++i) {
                    double mean_dh = 0.0, mean_dh_xhat = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                        const double dh = up[i * n + j] * gamma->data[j];
                        mean_dh += dh;
                        mean_dh_xhat += dh * (*xhat)[i * n + j];
                    }
                    mean_dh /= static_cast<double>(n);
                    mean_dh_xhat /= static_cast<double>(n);
                    for (std::size_t j = 0; j < n; ++j) {
                        const double dh = up[i * n + j] * gamma->data[j];
                        gx[i * n + j] +=
                            (*inv_std)[i] * (dh - mean_dh - (*xhat)[i * n + j] * mean_dh_xhat);
                    }
                }
            }
        };
    }
    return out;
}

// ---------------------------------------------------------------------------
// shape surgery
// ---------------------------------------------------------------------------

namespace {

void require_rank2_same_cols(const std::vector<TensorPtr>& parts, const char* op) {
    if (parts.empty()) throw std::invalid_argument(std::string(op) + ": no inputs");
    for (const auto& p : parts) {
        if (p->rank() != 2) throw std::invalid_argument(std::string(op) + ": rank-2 inputs required");
    }
}

}  // namespace

TensorPtr concat_rows(const std::vector<TensorPtr>& parts) {
    require_rank2_same_cols(parts, "concat_rows");
    const std::size_t d = parts[0]->cols();
    std::size_t total = 0;
    for (const auto& p : parts) {
        if (p->cols() != d) throw std::invalid_argument("concat_rows: column counts differ");
        total += p->rows();
    }
    auto out = Tensor::zeros({total, d});
    std::size_t r = 0;
    for (const auto& p : parts) {
        std::copy(p->data.begin(), p->data.end(), out->data.begin() + static_cast<long>(r * d));
        r += p->rows();
    }
    bool any = false;
    for (const auto& p : parts) any = any || p->requires_grad;
    if (any) {
        out->requires_grad = true;
        out->parents = parts;
        out->backward_fn = [parts, d](const std::vector<double>& up, AdjointMap& adj) {
            std::size_t r = 0;
            for (const auto& p : parts) {
                if (p->requires_grad) {
                    auto& gp = adj.buffer(p.get());
                    for (std::size_t i = 0; i < p->numel(); ++i) gp[i] += up[r * d + i];
                }
                r += p->rows();
            }
        };
    }
    return out;
}

TensorPtr concat_cols(const std::vector<TensorPtr>& parts) {
    require_rank2_same_cols(parts, "concat_cols");
    const std::size_t m = parts[0]->rows();
    std::size_t total = 0;
    for (const auto& p : parts) {
        if (p->rows() != m) throw std::invalid_argument("concat_cols: row counts differ");
        total += p->cols();
    }
    auto out = Tensor::zeros({m, total});
    std::size_t c = 0;
    for (const auto& p : parts) {
        const std::size_t pc = p->cols();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < pc; ++j) out->data[i * total + c + j] = p->data[i * pc + j];
        c += pc;
    }
    bool any = false;
    for (const auto& p : parts) any = any || p->requires_grad;
    if (any) {
        out->requires_grad = true;
        out->parents = parts;
        out->backward_fn = [parts, m, total](const std::vector<double>& up, AdjointMap& adj) {
            std::size_t c = 0;
            for (const auto& p : parts) {
                const std::size_t pc = p->cols();
                if (p->requires_grad) {
                    auto& gp = adj.buffer(p.get());
                    for (std::size_t i = 0; i < m; ++i)
                        for (std::size_t j = 0; j < pc; ++j) gp[i * pc + j] += up[i * total + c + j];
                }
                c += pc;
            }
        };
    }
    return out;
}

TensorPtr slice_rows(const TensorPtr& x, std::size_t start, std::size_t count) {
    if (x->rank() != 2) throw std::invalid_argument("slice_rows: rank-2 tensor required");
    if (start + count > x->rows()) throw std::invalid_argument("slice_rows: range out of bounds");
    const std::size_t d = x->cols();
    auto out = Tensor::zeros({count, d});
    std::copy(x->data.begin() + static_cast<long>(start * d),
              x->data.begin() + static_cast<long>((start + count) * d), out->data.begin());
    if (track(x)) {
        out->requires_grad = true;
        out->parents = {x};
        out->backward_fn = [x, start, count, d](const std::vector<double>& up, AdjointMap& adj) {
            auto& gx = adj.buffer(x.get());
            for (std::size_t i = 0; i < count * d; ++i) gx[start * d + i] += up[i];
        };
    }
    return out;
}

TensorPtr slice_cols(const TensorPtr& x, std::size_t start, std::size_t count) {
    if (x->rank() != 2) throw std::invalid_argument("slice_cols: rank-2 tensor required");
    if (start + count > x->cols()) throw std::invalid_argument("slice_cols: range out of bounds");
    const std::size_t m = x->rows(), n = x->cols();
    auto out = Tensor::zeros({m, count});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < count; ++j) out->data[i * count + j] = x->data[i * n + start + j];
    if (track(x)) {
        out->requires_grad = true;
        out->parents = {x};
        out->backward_fn = [x, start, count, m, n](const std::vector<double>& up, AdjointMap& adj) {
            auto& gx = adj.buffer(x.get());
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < count; ++j) gx[i * n + start + j] += up[i * count + j];
        };
    }
    return out;
}

TensorPtr gather_rows(const TensorPtr& table, const std::vector<int>& ids) {
    if (table->rank() != 2) throw std::invalid_argument("gather_rows: rank-2 table required");
    const std::size_t v = table->rows(), d = table->cols();
    for (int id : ids) {
        if (id < 0 || static_cast<std::size_t>(id) >= v) {
            throw std::invalid_argument("gather_rows: id " + std::to_string(id) + " out of range [0, " +
                                        std::to_string(v) + ")");
        }
    }
    auto out = Tensor::zeros({ids.size(), d});
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const double* src = &table->data[static_cast<std::size_t>(ids[i]) * d];
        std::copy(src, src + d, &out->data[i * d]);
    }
    if (track(table)) {
        out->requires_grad = true;
        out->parents = {table};
        auto idcopy = ids;
        out->backward_fn = [table, idcopy, d](const std::vector<double>& up, AdjointMap& adj) {
            auto& gt = adj.buffer(table.get());
            for (std::size_t i = 0; i < idcopy.size(); ++i) {
                double* dst = &gt[static_cast<std::size_t>(idcopy[i]) * d];
                for (std::size_t j = 0; j < d; ++j) dst[j] += up[i * d + j];
            }
        };
    }
    return out;
}

// ---------------------------------------------------------------------------
// reductions / losses
// ---------------------------------------------------------------------------

TensorPtr sum_all(const TensorPtr& x) {
    double s = 0.0;
    for (double v : x->data) s += v;
    auto out = Tensor::scalar(s);
    if (track(x)) {
        out->requires_grad = true;
        out->parents = {x};
        out->backward_fn = [x](const std::vector<double>& up, AdjointMap& adj) {
            auto& gx = adj.buffer(x.get());
            for (double& g : gx) g += up[0];
        };
    }
    return out;
}

TensorPtr mean_all(const TensorPtr& x) {
    if (x->numel() == 0) throw std::invalid_argument("mean_all: empty tensor");
    return scale(sum_all(x), 1.0 / static_cast<double>(x->numel()));
}

TensorPtr nll_mean(const TensorPtr& log_probs, const std::vector<int>& targets, int ignore_id) {
    if (log_probs->rank() != 2) throw std::invalid_argument("nll_mean: rank-2 log_probs required");
    if (targets.size() != log_probs->rows()) {
        throw std::invalid_argument("nll_mean: one target per row required");
    }
    const std::size_t n = log_probs->cols();
    std::size_t count = 0;
    double total = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] == ignore_id) continue;
        if (targets[i] < 0 || static_cast<std::size_t>(targets[i]) >= n) {
            throw std::invalid_argument("nll_mean: target id out of range");
        }
        total -= log_probs->data[i * n + static_cast<std::size_t>(targets[i])];
        ++count;
    }
    if (count == 0) throw std::invalid_argument("nll_mean: every position ignored");
    auto out = Tensor::scalar(total / static_cast<double>(count));
    if (track(log_probs)) {
        out->requires_grad = true;
        out->parents = {log_probs};
        auto tcopy = targets;
        out->backward_fn = [log_probs, tcopy, ignore_id, n, count](const std::vector<double>& up,
                                                                   AdjointMap& adj) {
            auto& g = adj.buffer(log_probs.get());
            const double w = up[0] / static_cast<double>(count);
            for (std::size_t i = 0; i < tcopy.size(); ++i) {
                if (tcopy[i] == ignore_id) continue;
                g[i * n + static_cast<std::size_t>(tcopy[i])] -= w;
            }
        };
    }
    return out;
}

TensorPtr dropout(const TensorPtr& x, double rate, Rng& rng, bool training) {
    if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate must be in [0, 1)");
    if (!training || rate == 0.0) return x;
    auto keep = std::make_shared<std::vector<double>>(x->numel());
    const double inv_keep = 1.0 / (1.0 - rate);
    auto out = Tensor::zeros(x->shape);
    for (std::size_t i = 0; i < x->numel(); ++i) {
        const double k = rng.uniform() >= rate ? inv_keep : 0.0;
        (*keep)[i] = k;
        out->data[i] = x->data[i] * k;
    }
    if (track(x)) {
        out->requires_grad = true;
        out->parents = {x};
        out->backward_fn = [x, keep](const std::vector<double>& up, AdjointMap& adj) {
            auto& gx = adj.buffer(x.get());
            for (std::size_t i = 0; i < up.size(); ++i) gx[i] += up[i] * (*keep)[i];
        };
    }
    return out;
}

}  // namespace sgb
