#pragma once

// Adaptive-moment optimizer (beta1=0.9, beta2=0.999, eps=1e-8) with bias
// correction. Deterministic: parameters update in name order.

#include <cmath>
#include <map>
#include <string>

#include "lookahead/graph.hpp"
#include "lookahead/tensor.hpp"

namespace lookahead {

template <typename R>
class AdamT {
  public:
    explicit AdamT(R lr = R(1e-3), R beta1 = R(0.9), R beta2 = R(0.999), R eps = R(1e-8))
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    R learning_rate() const { return lr_; }
    void set_learning_rate(R lr) { lr_ = lr; }
    long step_count() const { return step_; }

    void step(ParameterStoreT<R>& store) {
        ++step_;
        const R bc1 = R(1) - std::pow(beta1_, static_cast<R>(step_));
        const R bc2 = R(1) - std::pow(beta2_, static_cast<R>(step_));
        for (auto& [name, p] : store) {
            Moments& m = moments_.try_emplace(name, p.value.shape()).first->second;
            for (std::size_t i = 0; i < p.value.numel(); ++i) {
                const R g = p.grad[i];
                m.first[i] = beta1_ * m.first[i] + (R(1) - beta1_) * g;
                m.second[i] = beta2_ * m.second[i] + (R(1) - beta2_) * g * g;
                const R mhat = m.first[i] / bc1;
                const R vhat = m.second[i] / bc2;
                p.value[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
            }
        }
    }

  private:
    struct Moments {
        TensorT<R> first;
        TensorT<R> second;
        explicit Moments(const std::vector<int>& shape) : first(shape), second(shape) {}
    };

    R lr_, beta1_, beta2_, eps_;
    long step_ = 0;
    std::map<std::string, Moments> moments_;
};

using Adam = AdamT<Real>;

}  // namespace lookahead
