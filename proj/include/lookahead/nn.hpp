#pragma once

// Shared network pieces: parameter initializers and the GRU cell.
//
// GRU convention (documented once, used by encoder, decoder and the
// sentiment encoders):
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   n = tanh(Wn x + Un (r .* h) + bn)
//   h' = (1 - z) .* n + z .* h

#include <cmath>
#include <string>

#include "lookahead/common.hpp"
#include "lookahead/graph.hpp"
#include "lookahead/tensor.hpp"

namespace lookahead {

namespace detail {

inline void init_uniform(Tensor& t, Rng& rng, double radius) {
    for (std::size_t i = 0; i < t.numel(); ++i) {
        t[i] = static_cast<Real>(rng.uniform(-radius, radius));
    }
}

inline void init_glorot(Tensor& t, Rng& rng) {
    const double fan_in = t.cols();
    const double fan_out = t.rows();
    init_uniform(t, rng, std::sqrt(6.0 / (fan_in + fan_out)));
}

inline void create_gru_params(ParameterStore& store, const std::string& prefix, int in_dim,
                              int hidden, Rng& rng) {
    for (const char* gate : {"z", "r", "n"}) {
        init_glorot(store.create(prefix + ".W" + gate, {hidden, in_dim}).value, rng);
        init_glorot(store.create(prefix + ".U" + gate, {hidden, hidden}).value, rng);
        store.create(prefix + ".b" + gate, {hidden});  // zero
    }
}

}  // namespace detail

// Per-graph view of one GRU cell's parameters.
struct GruCell {
    Var Wz, Uz, bz, Wr, Ur, br, Wn, Un, bn;

    static GruCell bind(Graph& g, ParameterStore& store, const std::string& prefix) {
        return GruCell{g.param(store.get(prefix + ".Wz")), g.param(store.get(prefix + ".Uz")),
                       g.param(store.get(prefix + ".bz")), g.param(store.get(prefix + ".Wr")),
                       g.param(store.get(prefix + ".Ur")), g.param(store.get(prefix + ".br")),
                       g.param(store.get(prefix + ".Wn")), g.param(store.get(prefix + ".Un")),
                       g.param(store.get(prefix + ".bn"))};
    }
};

inline Var gru_cell(Graph& g, const GruCell& p, Var x, Var h_prev) {
    auto z = g.sigmoid(g.add(g.add(g.matmul(p.Wz, x), g.matmul(p.Uz, h_prev)), p.bz));
    auto r = g.sigmoid(g.add(g.add(g.matmul(p.Wr, x), g.matmul(p.Ur, h_prev)), p.br));
    auto n = g.tanh_op(
        g.add(g.add(g.matmul(p.Wn, x), g.matmul(p.Un, g.mul(r, h_prev))), p.bn));
    return g.add(g.mul(g.rsub_const(Real(1), z), n), g.mul(z, h_prev));
}

}  // namespace lookahead
