#include <doctest.h>

#include <cmath>

#include "lookahead/grad_check.hpp"
#include "lookahead/graph.hpp"

using namespace lookahead;

TEST_CASE("forward op values: softmax, tanh, sigmoid") {
    Graph g;
    auto sm = g.softmax(g.constant_vector({1.0, 1.0}));
    CHECK(sm.value()[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sm.value()[1] == doctest::Approx(0.5).epsilon(1e-12));

    auto single = g.softmax(g.constant_vector({3.7}));
    CHECK(single.value()[0] == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(g.tanh_op(g.constant_scalar(0.0)).item() == 0.0);
    CHECK(g.sigmoid(g.constant_scalar(0.0)).item() == 0.5);
}

TEST_CASE("softmax outputs are a distribution within 1e-9") {
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        Graph g;
        std::vector<Real> logits(1 + rng.index(30));
        for (auto& v : logits) v = rng.uniform(-8.0, 8.0);
        auto p = g.softmax(g.constant_vector(logits));
        Real sum = 0;
        for (std::size_t i = 0; i < p.value().numel(); ++i) {
            const Real pi = p.value()[i];
            CHECK(pi > 0.0);
            CHECK(pi < 1.0 + 1e-12);
            sum += pi;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("shape mismatches name the op and both shapes") {
    Graph g;
    auto a = g.constant_vector({1.0, 2.0});
    auto b = g.constant_vector({1.0, 2.0, 3.0});
    try {
        g.add(a, b);
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("add") != std::string::npos);
        CHECK(msg.find("[2]") != std::string::npos);
        CHECK(msg.find("[3]") != std::string::npos);
    }
    auto m = g.constant(Tensor({2, 2}, {1, 2, 3, 4}));
    CHECK_THROWS_AS(g.matmul(m, b), ShapeError);
}

TEST_CASE("backward of sum(W x) with x fixed has outer-product structure") {
    ParameterStore store;
    auto& W = store.create("W", {3, 2});
    Rng rng(5);
    for (std::size_t i = 0; i < W.value.numel(); ++i) W.value[i] = rng.normal(0, 1);
    const std::vector<Real> x = {0.7, -1.3};

    auto build = [&](Graph& g) {
        return g.sum(g.matmul(g.param(W), g.constant_vector(x)));
    };
    const auto report = grad_check<Real>(store, build, {1e-5, 1e-4, 0, 0});
    CHECK(report.pass);
    // analytic structure: each row of dW equals x
    store.zero_grads();
    Graph g;
    g.backward(build(g));
    for (int r = 0; r < 3; ++r) {
        CHECK(W.grad.at(r, 0) == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(W.grad.at(r, 1) == doctest::Approx(-1.3).epsilon(1e-12));
    }
}

TEST_CASE("parameters unused by the loss get exactly zero gradient") {
    ParameterStore store;
    auto& used = store.create("used", {2});
    auto& unused = store.create("unused", {4});
    used.value[0] = 1.5;
    used.value[1] = -0.5;
    unused.value.fill(2.0);
    Graph g;
    auto loss = g.sum(g.mul(g.param(used), g.param(used)));
    g.backward(loss);
    for (std::size_t i = 0; i < unused.grad.numel(); ++i) CHECK(unused.grad[i] == 0.0);
    CHECK(used.grad[0] == doctest::Approx(3.0));
}

TEST_CASE("softmax cross-entropy gradient equals softmax minus one-hot") {
    ParameterStore store;
    auto& z = store.create("z", {4});
    z.value = Tensor({4}, {0.2, -1.0, 0.7, 0.1});
    const int target = 2;

    auto build = [&](Graph& g) {
        return g.scale(g.log_softmax_pick(g.param(z), target), Real(-1));
    };
    const auto report = grad_check<Real>(store, build, {1e-5, 1e-4, 0, 0});
    CHECK(report.pass);

    store.zero_grads();
    Graph g;
    g.backward(build(g));
    auto p = g.softmax(g.constant_vector(z.value.values()));
    for (int i = 0; i < 4; ++i) {
        const Real expect = p.value()[static_cast<std::size_t>(i)] - (i == target ? 1.0 : 0.0);
        CHECK(z.grad[static_cast<std::size_t>(i)] == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("log_softmax_pick matches log of the softmax entry") {
    Rng rng(12);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Real> logits(2 + rng.index(20));
        for (auto& v : logits) v = rng.uniform(-10.0, 10.0);
        const int k = static_cast<int>(rng.index(logits.size()));
        Graph g;
        auto z = g.constant_vector(logits);
        const Real direct = g.log_softmax_pick(z, k).item();
        const Real via_softmax = std::log(g.softmax(z).value()[static_cast<std::size_t>(k)]);
        CHECK(direct == doctest::Approx(via_softmax).epsilon(1e-9));
    }
}

TEST_CASE("gradient accumulation is additive and zero_grads resets it") {
    ParameterStore store;
    auto& w = store.create("w", {2});
    w.value[0] = 0.3;
    w.value[1] = -0.8;

    auto run_backward = [&]() {
        Graph g;
        auto v = g.param(w);
        g.backward(g.dot(v, v));
    };
    store.zero_grads();
    run_backward();
    const Tensor once = w.grad;
    run_backward();
    for (std::size_t i = 0; i < once.numel(); ++i) {
        CHECK(w.grad[i] == 2.0 * once[i]);  // exact doubling
    }
    store.zero_grads();
    run_backward();
    for (std::size_t i = 0; i < once.numel(); ++i) CHECK(w.grad[i] == once[i]);
}

TEST_CASE("backward requires a scalar loss") {
    ParameterStore store;
    auto& w = store.create("w", {3});
    Graph g;
    auto v = g.param(w);
    CHECK_THROWS_AS(g.backward(v), ShapeError);
}

TEST_CASE("composite of concat, mul, scale, tanh, attention-like ops passes grad check") {
    ParameterStore store;
    Rng rng(31);
    auto& a = store.create("a", {3});
    auto& b = store.create("b", {3});
    auto& W = store.create("W", {2, 6});
    for (auto* p : {&a, &b}) {
        for (std::size_t i = 0; i < p->value.numel(); ++i) p->value[i] = rng.normal(0, 1);
    }
    for (std::size_t i = 0; i < W.value.numel(); ++i) W.value[i] = rng.normal(0, 0.5);

    auto build = [&](Graph& g) {
        auto va = g.param(a);
        auto vb = g.param(b);
        auto cat = g.concat(g.mul(va, vb), g.rsub_const(Real(1), g.scale(vb, Real(0.5))));
        auto h = g.tanh_op(g.matmul(g.param(W), cat));
        auto rows = g.stack_rows({h, g.sigmoid(h)});
        auto attn = g.softmax(g.matmul(rows, g.tanh_op(h)));
        auto ctx = g.weighted_sum_rows(rows, attn);
        return g.mean(g.mul(ctx, ctx));
    };
    const auto report = grad_check<Real>(store, build, {1e-5, 1e-4, 0, 0});
    INFO("max rel err ", report.max_rel_error, " at ", report.worst_coord);
    CHECK(report.pass);
}

TEST_CASE("embedding_row gradient scatters into the looked-up row only") {
    ParameterStore store;
    auto& E = store.create("E", {4, 3});
    Rng rng(9);
    for (std::size_t i = 0; i < E.value.numel(); ++i) E.value[i] = rng.normal(0, 1);

    auto build = [&](Graph& g) {
        auto e = g.param(E);
        auto x = g.add(g.embedding_row(e, 2), g.embedding_row(e, 2));
        return g.sum(g.mul(x, x));
    };
    const auto report = grad_check<Real>(store, build, {1e-5, 1e-4, 0, 0});
    CHECK(report.pass);
    store.zero_grads();
    Graph g;
    g.backward(build(g));
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 3; ++c) {
            if (r != 2) CHECK(E.grad.at(r, c) == 0.0);
        }
    }
}

TEST_CASE("matrix-matrix product passes grad check") {
    ParameterStore store;
    auto& A = store.create("A", {2, 3});
    auto& B = store.create("B", {3, 4});
    Rng rng(17);
    for (std::size_t i = 0; i < A.value.numel(); ++i) A.value[i] = rng.normal(0, 1);
    for (std::size_t i = 0; i < B.value.numel(); ++i) B.value[i] = rng.normal(0, 1);
    auto build = [&](Graph& g) {
        auto c = g.matmul(g.param(A), g.param(B));
        return g.sum(g.mul(c, c));
    };
    CHECK(grad_check<Real>(store, build, {1e-5, 1e-4, 0, 0}).pass);
}

TEST_CASE("bce_logit value and gradient") {
    ParameterStore store;
    auto& s = store.create("s", {1});
    s.value[0] = 0.8;
    for (const Real y : {Real(0), Real(1)}) {
        auto build = [&](Graph& g) { return g.bce_logit(g.pick(g.param(s), 0), y); };
        Graph g;
        const Real loss = build(g).item();
        const Real p = Graph::sigmoid_scalar(s.value[0]);
        const Real expect = y > 0.5 ? -std::log(p) : -std::log(1 - p);
        CHECK(loss == doctest::Approx(expect).epsilon(1e-12));
        CHECK(grad_check<Real>(store, build, {1e-5, 1e-4, 0, 0}).pass);
    }
}

TEST_CASE("float instantiation of the tape works at reduced tolerance") {
    ParameterStoreT<float> store;
    auto& w = store.create("w", {3});
    w.value = TensorT<float>({3}, {0.5f, -1.0f, 2.0f});
    GraphT<float> g;
    auto v = g.param(w);
    auto loss = g.sum(g.mul(v, v));
    g.backward(loss);
    CHECK(loss.item() == doctest::Approx(5.25f).epsilon(1e-5));
    CHECK(w.grad[0] == doctest::Approx(1.0f).epsilon(1e-5));
}

TEST_CASE("tensors detect non-finite values") {
    Tensor t({2}, {1.0, 2.0});
    CHECK(t.all_finite());
    t[1] = std::numeric_limits<Real>::infinity();
    CHECK_FALSE(t.all_finite());
    t[1] = std::nan("");
    CHECK_FALSE(t.all_finite());
}
