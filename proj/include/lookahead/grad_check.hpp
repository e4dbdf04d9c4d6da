#pragma once

// Finite-difference gradient checker. The loss closure must rebuild its
// computation from the store's current values on every call, and must
// evaluate the same function whose analytic gradient is being checked
// (anything under a stop-gradient stays frozen inside the closure).
//
// A central difference at step h resolves gradients only down to about
// eps * |f| / h: below that, the difference of two loss evaluations is
// rounding noise. Coordinates whose analytic/FD discrepancy sits under this
// resolution are consistent with an exact gradient and count as passing.

#include <cfloat>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "lookahead/common.hpp"
#include "lookahead/graph.hpp"

namespace lookahead {

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::size_t coords_checked = 0;
    std::string worst_coord;
    double fd_resolution = 0.0;
    bool pass = false;
};

struct GradCheckOptions {
    double h = 1e-5;
    double tol = 1e-4;
    // 0 = check every coordinate; otherwise a seeded subsample of at least
    // this many coordinates (all of them if the store is smaller).
    std::size_t subsample = 0;
    std::uint64_t seed = 0;
};

template <typename R>
GradCheckReport grad_check(ParameterStoreT<R>& store,
                           const std::function<double()>& loss_fn,
                           const std::function<void()>& backward_fn,
                           const GradCheckOptions& opts = {}) {
    store.zero_grads();
    backward_fn();

    struct Coord {
        ParameterT<R>* param;
        std::string name;
        std::size_t index;
    };
    std::vector<Coord> coords;
    for (auto& [name, p] : store) {
        for (std::size_t i = 0; i < p.value.numel(); ++i) coords.push_back({&p, name, i});
    }
    if (opts.subsample > 0 && coords.size() > opts.subsample) {
        Rng rng(opts.seed);
        rng.shuffle(coords);
        coords.resize(opts.subsample);
    }

    GradCheckReport report;
    const double base = std::abs(loss_fn());
    report.fd_resolution = 8.0 * DBL_EPSILON * std::max(1.0, base) / opts.h;
    for (const Coord& c : coords) {
        const R saved = c.param->value[c.index];
        c.param->value[c.index] = saved + static_cast<R>(opts.h);
        const double up = loss_fn();
        c.param->value[c.index] = saved - static_cast<R>(opts.h);
        const double down = loss_fn();
        c.param->value[c.index] = saved;

        const double fd = (up - down) / (2.0 * opts.h);
        const double an = static_cast<double>(c.param->grad[c.index]);
        if (std::abs(an - fd) <= report.fd_resolution) {
            ++report.coords_checked;
            continue;  // below what a double-precision difference can certify
        }
        const double rel = std::abs(an - fd) / std::max(1e-8, std::abs(an) + std::abs(fd));
        if (rel > report.max_rel_error) {
            report.max_rel_error = rel;
            report.worst_coord = c.name + "[" + std::to_string(c.index) + "]";
        }
        ++report.coords_checked;
    }
    report.pass = report.max_rel_error <= opts.tol;
    return report;
}

// Convenience overload: one closure builds the graph and returns the loss Var.
template <typename R>
GradCheckReport grad_check(ParameterStoreT<R>& store,
                           const std::function<VarT<R>(GraphT<R>&)>& build,
                           const GradCheckOptions& opts = {}) {
    auto loss_fn = [&]() {
        GraphT<R> g;
        return static_cast<double>(build(g).item());
    };
    auto backward_fn = [&]() {
        GraphT<R> g;
        VarT<R> loss = build(g);
        g.backward(loss);
    };
    return grad_check(store, loss_fn, backward_fn, opts);
}

}  // namespace lookahead
