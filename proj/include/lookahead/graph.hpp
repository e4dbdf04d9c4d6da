#pragma once

// Reverse-mode automatic differentiation over a recorded op tape.
//
// A Graph owns the nodes of one forward computation. Creation order is a
// topological order, so backward() is a single reverse sweep that
// accumulates exact analytic gradients. Parameter leaves flush their
// gradients into the bound ParameterStore entries additively, so calling
// backward twice without zero_grads doubles the stored gradients.
//
// A graph is confined to one thread; parameter values may be shared
// read-only across concurrent graphs.

#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lookahead/common.hpp"
#include "lookahead/tensor.hpp"

namespace lookahead {

template <typename R>
struct ParameterT {
    TensorT<R> value;
    TensorT<R> grad;

    explicit ParameterT(std::vector<int> shape)
        : value(shape), grad(std::move(shape)) {}
    ParameterT(std::vector<int> shape, std::vector<R> data)
        : value(shape, std::move(data)), grad(std::move(shape)) {}
};

// Named parameter tensors with persistent gradient accumulators.
// std::map keeps iteration order deterministic.
template <typename R>
class ParameterStoreT {
  public:
    ParameterT<R>& create(const std::string& name, std::vector<int> shape) {
        auto [it, inserted] = params_.try_emplace(name, std::move(shape));
        if (!inserted) {
            throw std::logic_error("parameter already exists: " + name);
        }
        return it->second;
    }

    ParameterT<R>& get(const std::string& name) {
        auto it = params_.find(name);
        if (it == params_.end()) throw std::logic_error("no such parameter: " + name);
        return it->second;
    }

    const ParameterT<R>& get(const std::string& name) const {
        auto it = params_.find(name);
        if (it == params_.end()) throw std::logic_error("no such parameter: " + name);
        return it->second;
    }

    bool contains(const std::string& name) const { return params_.count(name) > 0; }

    void zero_grads() {
        for (auto& [name, p] : params_) p.grad.zero();
    }

    std::size_t total_values() const {
        std::size_t n = 0;
        for (const auto& [name, p] : params_) n += p.value.numel();
        return n;
    }

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }
    std::size_t size() const { return params_.size(); }

  private:
    std::map<std::string, ParameterT<R>> params_;
};

template <typename R>
class GraphT;

template <typename R>
struct VarT {
    GraphT<R>* graph = nullptr;
    int id = -1;

    bool valid() const { return graph != nullptr; }
    const TensorT<R>& value() const { return graph->value(*this); }
    R item() const { return value().item(); }
};

template <typename R>
class GraphT {
  public:
    using Var = VarT<R>;
    using Tensor = TensorT<R>;

    GraphT() = default;
    GraphT(const GraphT&) = delete;
    GraphT& operator=(const GraphT&) = delete;

    std::size_t node_count() const { return nodes_.size(); }

    const Tensor& value(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].value; }
    const Tensor& grad(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].grad; }

    // ---- leaves ----

    Var constant(Tensor t) { return make_node(std::move(t), nullptr); }

    Var constant_scalar(R v) { return constant(Tensor::scalar(v)); }

    Var constant_vector(std::vector<R> data) {
        return constant(Tensor::vector_of(std::move(data)));
    }

    // Leaf bound to a stored parameter; gradients flush into p.grad on backward.
    Var param(ParameterT<R>& p) {
        Var v = constant(p.value);
        bound_params_.emplace_back(v.id, &p);
        return v;
    }

    // ---- elementwise / structural ops ----

    Var add(Var a, Var b) {
        require_same_shape(a, b, "add");
        Tensor out = value(a);
        out.add_inplace(value(b));
        return make_node(std::move(out), [ia = a.id, ib = b.id](GraphT& g, const Tensor& go) {
            g.accumulate(ia, go);
            g.accumulate(ib, go);
        });
    }

    Var sub(Var a, Var b) {
        require_same_shape(a, b, "sub");
        Tensor out = value(a);
        const Tensor& vb = value(b);
        for (std::size_t i = 0; i < out.numel(); ++i) out[i] -= vb[i];
        return make_node(std::move(out), [ia = a.id, ib = b.id](GraphT& g, const Tensor& go) {
            g.accumulate(ia, go);
            Tensor& gb = g.nodes_[static_cast<std::size_t>(ib)].grad;
            for (std::size_t i = 0; i < go.numel(); ++i) gb[i] -= go[i];
        });
    }

    // Pointwise product.
    Var mul(Var a, Var b) {
        require_same_shape(a, b, "mul");
        Tensor out = value(a);
        const Tensor& vb = value(b);
        for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= vb[i];
        return make_node(std::move(out), [ia = a.id, ib = b.id](GraphT& g, const Tensor& go) {
            const Tensor& va = g.nodes_[static_cast<std::size_t>(ia)].value;
            const Tensor& vb2 = g.nodes_[static_cast<std::size_t>(ib)].value;
            Tensor& ga = g.nodes_[static_cast<std::size_t>(ia)].grad;
            Tensor& gb = g.nodes_[static_cast<std::size_t>(ib)].grad;
            for (std::size_t i = 0; i < go.numel(); ++i) {
                ga[i] += go[i] * vb2[i];
                gb[i] += go[i] * va[i];
            }
        });
    }

    Var scale(Var a, R c) {
        Tensor out = value(a);
        for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= c;
        return make_node(std::move(out), [ia = a.id, c](GraphT& g, const Tensor& go) {
            Tensor& ga = g.nodes_[static_cast<std::size_t>(ia)].grad;
            for (std::size_t i = 0; i < go.numel(); ++i) ga[i] += c * go[i];
        });
    }

    Var add_const(Var a, R c) {
        Tensor out = value(a);
        for (std::size_t i = 0; i < out.numel(); ++i) out[i] += c;
        return make_node(std::move(out), [ia = a.id](GraphT& g, const Tensor& go) {
            g.accumulate(ia, go);
        });
    }

    // c - a
    Var rsub_const(R c, Var a) {
        Tensor out = value(a);
        for (std::size_t i = 0; i < out.numel(); ++i) out[i] = c - out[i];
        return make_node(std::move(out), [ia = a.id](GraphT& g, const Tensor& go) {
            Tensor& ga = g.nodes_[static_cast<std::size_t>(ia)].grad;
            for (std::size_t i = 0; i < go.numel(); ++i) ga[i] -= go[i];
        });
    }

    Var concat(Var a, Var b) {
        const Tensor& va = value(a);
        const Tensor& vb = value(b);
        if (va.rank() != 1 || vb.rank() != 1) {
            throw ShapeError("concat expects vectors, got " + va.shape_string() + " and " +
                             vb.shape_string());
        }
        std::vector<R> data;
        data.reserve(va.numel() + vb.numel());
        data.insert(data.end(), va.values().begin(), va.values().end());
        data.insert(data.end(), vb.values().begin(), vb.values().end());
        const std::size_t na = va.numel();
        return make_node(Tensor::vector_of(std::move(data)),
                         [ia = a.id, ib = b.id, na](GraphT& g, const Tensor& go) {
                             Tensor& ga = g.nodes_[static_cast<std::size_t>(ia)].grad;
                             Tensor& gb = g.nodes_[static_cast<std::size_t>(ib)].grad;
                             for (std::size_t i = 0; i < na; ++i) ga[i] += go[i];
                             for (std::size_t i = na; i < go.numel(); ++i) gb[i - na] += go[i];
                         });
    }

    Var tanh_op(Var a) {
        Tensor out = value(a);
        for (std::size_t i = 0; i < out.numel(); ++i)
            out[i] = std::tanh(out[i]);
        return make_node(std::move(out), [ia = a.id, self = next_id()](GraphT& g, const Tensor& go) {
            const Tensor& y = g.nodes_[static_cast<std::size_t>(self)].value;
            Tensor& ga = g.nodes_[static_cast<std::size_t>(ia)].grad;
            for (std::size_t i = 0; i < go.numel(); ++i) ga[i] += go[i] * (R(1) - y[i] * y[i]);
        });
    }

    Var sigmoid(Var a) {
        Tensor out = value(a);
        for (std::size_t i = 0; i < out.numel(); ++i) out[i] = sigmoid_scalar(out[i]);
        return make_node(std::move(out), [ia = a.id, self = next_id()](GraphT& g, const Tensor& go) {
            const Tensor& y = g.nodes_[static_cast<std::size_t>(self)].value;
            Tensor& ga = g.nodes_[static_cast<std::size_t>(ia)].grad;
            for (std::size_t i = 0; i < go.numel(); ++i) ga[i] += go[i] * y[i] * (R(1) - y[i]);
        });
    }

    Var log_op(Var a) {
        Tensor out = value(a);
        for (std::size_t i = 0; i < out.numel(); ++i) out[i] = std::log(out[i]);
        return make_node(std::move(out), [ia = a.id](GraphT& g, const Tensor& go) {
            const Tensor& va = g.nodes_[static_cast<std::size_t>(ia)].value;
            Tensor& ga = g.nodes_[static_cast<std::size_t>(ia)].grad;
            for (std::size_t i = 0; i < go.numel(); ++i) ga[i] += go[i] / va[i];
        });
    }

    // Max-shifted softmax. 1-D: over the whole vector (axis must be 0 or -1).
    // 2-D: per row for axis 1/-1, per column rejected.
    Var softmax(Var a, int axis = -1) {
        const Tensor& va = value(a);
        if (va.rank() == 1) {
            if (axis != 0 && axis != -1) {
                throw ShapeError("softmax: axis " + std::to_string(axis) +
                                 " invalid for shape " + va.shape_string());
            }
            Tensor out = va;
            softmax_span(out.data(), out.numel());
            return make_node(std::move(out),
                             [ia = a.id, self = next_id()](GraphT& g, const Tensor& go) {
                                 const Tensor& y = g.nodes_[static_cast<std::size_t>(self)].value;
                                 Tensor& ga = g.nodes_[static_cast<std::size_t>(ia)].grad;
                                 softmax_backward_span(y.data(), go.data(), ga.data(), go.numel());
                             });
        }
        if (va.rank() == 2 && (axis == 1 || axis == -1)) {
            Tensor out = va;
            const std::size_t n = static_cast<std::size_t>(va.cols());
            for (int r = 0; r < va.rows(); ++r) {
                softmax_span(out.data() + static_cast<std::size_t>(r) * n, n);
            }
            return make_node(std::move(out),
                             [ia = a.id, self = next_id(), n](GraphT& g, const Tensor& go) {
                                 const Tensor& y = g.nodes_[static_cast<std::size_t>(self)].value;
                                 Tensor& ga = g.nodes_[static_cast<std::size_t>(ia)].grad;
                                 for (int r = 0; r < y.rows(); ++r) {
                                     const std::size_t off = static_cast<std::size_t>(r) * n;
                                     softmax_backward_span(y.data() + off, go.data() + off,
                                                           ga.data() + off, n);
                                 }
                             });
        }
        throw ShapeError("softmax: unsupported axis " + std::to_string(axis) + " for shape " +
                         va.shape_string());
    }

    // ---- linear algebra ----

    // matmul: (m x n)·(n) -> (m), or (m x n)·(n x k) -> (m x k).
    Var matmul(Var a, Var b) {
        const Tensor& A = value(a);
        const Tensor& B = value(b);
        if (A.rank() != 2) {
            throw ShapeError("matmul: left operand must be a matrix, got " + A.shape_string());
        }
        if (B.rank() == 1) {
            if (A.cols() != B.dim(0)) {
                throw ShapeError("matmul shape mismatch: " + A.shape_string() + " x " +
                                 B.shape_string());
            }
            const int m = A.rows(), n = A.cols();
            Tensor out({m});
            for (int i = 0; i < m; ++i) {
                R acc = 0;
                const R* row = A.data() + static_cast<std::size_t>(i) * n;
                for (int j = 0; j < n; ++j) acc += row[j] * B[static_cast<std::size_t>(j)];
                out[static_cast<std::size_t>(i)] = acc;
            }
            return make_node(std::move(out),
                             [ia = a.id, ib = b.id, m, n](GraphT& g, const Tensor& go) {
                                 const Tensor& A2 = g.nodes_[static_cast<std::size_t>(ia)].value;
                                 const Tensor& x = g.nodes_[static_cast<std::size_t>(ib)].value;
                                 Tensor& gA = g.nodes_[static_cast<std::size_t>(ia)].grad;
                                 Tensor& gx = g.nodes_[static_cast<std::size_t>(ib)].grad;
                                 for (int i = 0; i < m; ++i) {
                                     const R gi = go[static_cast<std::size_t>(i)];
                                     R* gArow = gA.data() + static_cast<std::size_t>(i) * n;
                                     const R* Arow = A2.data() + static_cast<std::size_t>(i) * n;
                                     for (int j = 0; j < n; ++j) {
                                         gArow[j] += gi * x[static_cast<std::size_t>(j)];
                                         gx[static_cast<std::size_t>(j)] += gi * Arow[j];
                                     }
                                 }
                             });
        }
        if (B.rank() == 2) {
            if (A.cols() != B.rows()) {
                throw ShapeError("matmul shape mismatch: " + A.shape_string() + " x " +
                                 B.shape_string());
            }
            const int m = A.rows(), n = A.cols(), k = B.cols();
            Tensor out({m, k});
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < k; ++j) {
                    R acc = 0;
                    for (int t = 0; t < n; ++t) acc += A.at(i, t) * B.at(t, j);
                    out.at(i, j) = acc;
                }
            }
            return make_node(std::move(out),
                             [ia = a.id, ib = b.id, m, n, k](GraphT& g, const Tensor& go) {
                                 const Tensor& A2 = g.nodes_[static_cast<std::size_t>(ia)].value;
                                 const Tensor& B2 = g.nodes_[static_cast<std::size_t>(ib)].value;
                                 Tensor& gA = g.nodes_[static_cast<std::size_t>(ia)].grad;
                                 Tensor& gB = g.nodes_[static_cast<std::size_t>(ib)].grad;
                                 for (int i = 0; i < m; ++i) {
                                     for (int j = 0; j < k; ++j) {
                                         const R gij = go.at(i, j);
                                         for (int t = 0; t < n; ++t) {
                                             gA.at(i, t) += gij * B2.at(t, j);
                                             gB.at(t, j) += gij * A2.at(i, t);
                                         }
                                     }
                                 }
                             });
        }
        throw ShapeError("matmul: right operand rank unsupported: " + B.shape_string());
    }

    Var dot(Var a, Var b) {
        require_same_shape(a, b, "dot");
        const Tensor& va = value(a);
        const Tensor& vb = value(b);
        R acc = 0;
        for (std::size_t i = 0; i < va.numel(); ++i) acc += va[i] * vb[i];
        return make_node(Tensor::scalar(acc), [ia = a.id, ib = b.id](GraphT& g, const Tensor& go) {
            const R g0 = go[0];
            const Tensor& va2 = g.nodes_[static_cast<std::size_t>(ia)].value;
            const Tensor& vb2 = g.nodes_[static_cast<std::size_t>(ib)].value;
            Tensor& ga = g.nodes_[static_cast<std::size_t>(ia)].grad;
            Tensor& gb = g.nodes_[static_cast<std::size_t>(ib)].grad;
            for (std::size_t i = 0; i < va2.numel(); ++i) {
                ga[i] += g0 * vb2[i];
                gb[i] += g0 * va2[i];
            }
        });
    }

    Var sum(Var a) {
        const Tensor& va = value(a);
        R acc = 0;
        for (std::size_t i = 0; i < va.numel(); ++i) acc += va[i];
        return make_node(Tensor::scalar(acc), [ia = a.id](GraphT& g, const Tensor& go) {
            const R g0 = go[0];
            Tensor& ga = g.nodes_[static_cast<std::size_t>(ia)].grad;
            for (std::size_t i = 0; i < ga.numel(); ++i) ga[i] += g0;
        });
    }

    Var mean(Var a) {
        const std::size_t n = value(a).numel();
        return scale(sum(a), R(1) / static_cast<R>(n));
    }

    Var pick(Var a, int index) {
        const Tensor& va = value(a);
        if (va.rank() != 1 || index < 0 || index >= va.dim(0)) {
            throw ShapeError("pick: index " + std::to_string(index) + " out of range for " +
                             va.shape_string());
        }
        return make_node(Tensor::scalar(va[static_cast<std::size_t>(index)]),
                         [ia = a.id, index](GraphT& g, const Tensor& go) {
                             g.nodes_[static_cast<std::size_t>(ia)].grad[static_cast<std::size_t>(
                                 index)] += go[0];
                         });
    }

    // Stack M same-length vectors into an (M x n) matrix.
    Var stack_rows(const std::vector<Var>& rows) {
        if (rows.empty()) throw ShapeError("stack_rows: empty row list");
        const int n = value(rows[0]).dim(0);
        const int m = static_cast<int>(rows.size());
        Tensor out({m, n});
        std::vector<int> ids;
        ids.reserve(rows.size());
        for (int i = 0; i < m; ++i) {
            const Tensor& vi = value(rows[static_cast<std::size_t>(i)]);
            if (vi.rank() != 1 || vi.dim(0) != n) {
                throw ShapeError("stack_rows: row " + std::to_string(i) + " has shape " +
                                 vi.shape_string() + ", expected [" + std::to_string(n) + "]");
            }
            for (int j = 0; j < n; ++j) out.at(i, j) = vi[static_cast<std::size_t>(j)];
            ids.push_back(rows[static_cast<std::size_t>(i)].id);
        }
        return make_node(std::move(out), [ids, n](GraphT& g, const Tensor& go) {
            for (std::size_t i = 0; i < ids.size(); ++i) {
                Tensor& gr = g.nodes_[static_cast<std::size_t>(ids[i])].grad;
                const R* row = go.data() + i * static_cast<std::size_t>(n);
                for (int j = 0; j < n; ++j) gr[static_cast<std::size_t>(j)] += row[j];
            }
        });
    }

    // c = sum_i a_i * H_i where H is (M x n) and a is (M): attention context.
    Var weighted_sum_rows(Var h, Var a) {
        const Tensor& H = value(h);
        const Tensor& A = value(a);
        if (H.rank() != 2 || A.rank() != 1 || H.rows() != A.dim(0)) {
            throw ShapeError("weighted_sum_rows shape mismatch: " + H.shape_string() + " and " +
                             A.shape_string());
        }
        const int m = H.rows(), n = H.cols();
        Tensor out({n});
        for (int i = 0; i < m; ++i) {
            const R w = A[static_cast<std::size_t>(i)];
            const R* row = H.data() + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] += w * row[j];
        }
        return make_node(std::move(out),
                         [ih = h.id, ia = a.id, m, n](GraphT& g, const Tensor& go) {
                             const Tensor& H2 = g.nodes_[static_cast<std::size_t>(ih)].value;
                             const Tensor& A2 = g.nodes_[static_cast<std::size_t>(ia)].value;
                             Tensor& gH = g.nodes_[static_cast<std::size_t>(ih)].grad;
                             Tensor& gA = g.nodes_[static_cast<std::size_t>(ia)].grad;
                             for (int i = 0; i < m; ++i) {
                                 const R w = A2[static_cast<std::size_t>(i)];
                                 const R* row = H2.data() + static_cast<std::size_t>(i) * n;
                                 R* grow = gH.data() + static_cast<std::size_t>(i) * n;
                                 R acc = 0;
                                 for (int j = 0; j < n; ++j) {
                                     grow[j] += w * go[static_cast<std::size_t>(j)];
                                     acc += row[j] * go[static_cast<std::size_t>(j)];
                                 }
                                 gA[static_cast<std::size_t>(i)] += acc;
                             }
                         });
    }

    // Select row `id` from an embedding matrix; gradient scatters into that row.
    Var embedding_row(Var table, int id) {
        const Tensor& E = value(table);
        if (E.rank() != 2 || id < 0 || id >= E.rows()) {
            throw ShapeError("embedding_row: id " + std::to_string(id) + " out of range for " +
                             E.shape_string());
        }
        const int n = E.cols();
        Tensor out({n});
        const R* row = E.data() + static_cast<std::size_t>(id) * n;
        for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = row[j];
        return make_node(std::move(out), [it = table.id, id, n](GraphT& g, const Tensor& go) {
            R* grow = g.nodes_[static_cast<std::size_t>(it)].grad.data() +
                      static_cast<std::size_t>(id) * n;
            for (int j = 0; j < n; ++j) grow[j] += go[static_cast<std::size_t>(j)];
        });
    }

    // ---- stable composites ----

    // log softmax(z)[k], computed without materializing the distribution.
    // Gradient w.r.t. z is onehot(k) - softmax(z).
    Var log_softmax_pick(Var z, int k) {
        const Tensor& vz = value(z);
        if (vz.rank() != 1 || k < 0 || k >= vz.dim(0)) {
            throw ShapeError("log_softmax_pick: index " + std::to_string(k) +
                             " out of range for " + vz.shape_string());
        }
        const std::size_t n = vz.numel();
        R mx = vz[0];
        for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, vz[i]);
        R sum_exp = 0;
        for (std::size_t i = 0; i < n; ++i) sum_exp += std::exp(vz[i] - mx);
        const R log_z = mx + std::log(sum_exp);
        return make_node(Tensor::scalar(vz[static_cast<std::size_t>(k)] - log_z),
                         [iz = z.id, k, mx, sum_exp](GraphT& g, const Tensor& go) {
                             const R g0 = go[0];
                             const Tensor& z2 = g.nodes_[static_cast<std::size_t>(iz)].value;
                             Tensor& gz = g.nodes_[static_cast<std::size_t>(iz)].grad;
                             for (std::size_t i = 0; i < z2.numel(); ++i) {
                                 const R p = std::exp(z2[i] - mx) / sum_exp;
                                 gz[i] += g0 * ((static_cast<int>(i) == k ? R(1) : R(0)) - p);
                             }
                         });
    }

    // Binary cross-entropy from a scalar logit: softplus(s) - y*s.
    // Gradient w.r.t. s is sigmoid(s) - y.
    Var bce_logit(Var s, R y) {
        const R sv = value(s).item();
        const R loss = softplus_scalar(sv) - y * sv;
        return make_node(Tensor::scalar(loss), [is = s.id, y](GraphT& g, const Tensor& go) {
            const R sv2 = g.nodes_[static_cast<std::size_t>(is)].value[0];
            g.nodes_[static_cast<std::size_t>(is)].grad[0] +=
                go[0] * (sigmoid_scalar(sv2) - y);
        });
    }

    // ---- backward ----

    // Accumulates d(loss)/d(theta) into every bound parameter's gradient.
    // Node-local gradients are reset first, so repeated calls are additive
    // on the parameter store only.
    void backward(Var loss) {
        const Tensor& lv = value(loss);
        if (lv.numel() != 1) {
            throw ShapeError("backward requires a scalar loss, got shape " + lv.shape_string());
        }
        for (auto& node : nodes_) node.grad.zero();
        nodes_[static_cast<std::size_t>(loss.id)].grad[0] = R(1);
        for (std::size_t i = nodes_.size(); i-- > 0;) {
            Node& node = nodes_[i];
            if (node.backward) node.backward(*this, node.grad);
        }
        for (auto& [id, p] : bound_params_) {
            p->grad.add_inplace(nodes_[static_cast<std::size_t>(id)].grad);
        }
    }

    static R sigmoid_scalar(R x) {
        if (x >= R(0)) {
            const R e = std::exp(-x);
            return R(1) / (R(1) + e);
        }
        const R e = std::exp(x);
        return e / (R(1) + e);
    }

    static R softplus_scalar(R x) {
        const R ax = std::abs(x);
        return std::max(x, R(0)) + std::log1p(std::exp(-ax));
    }

  private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void(GraphT&, const Tensor&)> backward;
    };

    int next_id() const { return static_cast<int>(nodes_.size()); }

    Var make_node(Tensor value, std::function<void(GraphT&, const Tensor&)> bw) {
        Node node;
        node.grad = Tensor(value.shape());
        node.value = std::move(value);
        node.backward = std::move(bw);
        nodes_.push_back(std::move(node));
        return Var{this, static_cast<int>(nodes_.size()) - 1};
    }

    void accumulate(int id, const Tensor& g) {
        nodes_[static_cast<std::size_t>(id)].grad.add_inplace(g);
    }

    void require_same_shape(Var a, Var b, const char* op) const {
        if (!value(a).same_shape(value(b))) {
            throw ShapeError(std::string(op) + " shape mismatch: " + value(a).shape_string() +
                             " vs " + value(b).shape_string());
        }
    }

    static void softmax_span(R* x, std::size_t n) {
        R mx = x[0];
        for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, x[i]);
        R sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = std::exp(x[i] - mx);
            sum += x[i];
        }
        for (std::size_t i = 0; i < n; ++i) x[i] /= sum;
    }

    static void softmax_backward_span(const R* y, const R* go, R* ga, std::size_t n) {
        R dotp = 0;
        for (std::size_t i = 0; i < n; ++i) dotp += y[i] * go[i];
        for (std::size_t i = 0; i < n; ++i) ga[i] += y[i] * (go[i] - dotp);
    }

    std::deque<Node> nodes_;
    std::vector<std::pair<int, ParameterT<R>*>> bound_params_;
};

using Parameter = ParameterT<Real>;
using ParameterStore = ParameterStoreT<Real>;
using Graph = GraphT<Real>;
using Var = VarT<Real>;

}  // namespace lookahead
