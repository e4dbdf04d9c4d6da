#pragma once

// Training losses.
//
//   L_MLE   = -(1/T) sum_t log P(y*_t)                 (teacher forcing)
//   Rhat_t  = W_r m_t + b_r                            (linear baseline)
//   L_b     = (1/T) sum_t (R - Rhat_t)^2
//   L_RL    = -(1/T) sum_t (R - Rhat_t) log P(y^s_t)
//   L_mixed = lambda * L_RL + (1 - lambda) * L_MLE
//
// Stop-gradient contracts: the baseline reads a detached copy of m_t, so
// L_b trains only W_r and b_r; the advantage (R - Rhat_t) enters L_RL as a
// plain constant, so the policy gradient never flows through the baseline
// or the reward models.

#include <string>
#include <vector>

#include "lookahead/common.hpp"
#include "lookahead/graph.hpp"
#include "lookahead/policy.hpp"
#include "lookahead/sentiment.hpp"

namespace lookahead {

// Teacher-forced negative log-likelihood of the gold target. PAD positions
// are excluded from both the sum and T.
inline Var mle_loss(PolicyNet& net, const EncoderOutput& enc, const std::vector<int>& target) {
    if (target.empty()) throw DataError("mle_loss: zero-length target");
    Graph& g = net.graph();
    Var m = enc.final_state;
    int prev = Vocabulary::kSosId;
    Var total;
    long steps = 0;
    for (int y : target) {
        if (y == Vocabulary::kPadId) continue;
        DecoderStep step = net.decode_step(enc, m, prev);
        Var nll = g.scale(g.log_softmax_pick(step.scaled_logits, y), Real(-1));
        total = total.valid() ? g.add(total, nll) : nll;
        ++steps;
        prev = y;
        m = step.m;
    }
    if (steps == 0) throw DataError("mle_loss: target contains only PAD");
    return g.scale(total, Real(1) / static_cast<Real>(steps));
}

enum class RewardMode { kCurrent, kLookahead };

inline const char* reward_mode_name(RewardMode m) {
    return m == RewardMode::kCurrent ? "current" : "lookahead";
}

// Per-graph view of the linear baseline reward parameters.
struct BaselineHead {
    Var w;
    Var b;

    static BaselineHead bind(Graph& g, ParameterStore& store) {
        return BaselineHead{g.param(store.get("baseline.w")), g.param(store.get("baseline.b"))};
    }

    // Rhat_t = W_r m_t + b_r on a detached copy of m_t: the baseline loss
    // must never push gradients into the decoder.
    Var estimate(Graph& g, Var m_t) const {
        Var detached = g.constant(m_t.value());
        return g.add(g.dot(w, detached), g.pick(b, 0));
    }
};

struct RewardRecord {
    Real reward = Real(0.5);               // R, one terminal reward per trajectory
    RewardMode mode = RewardMode::kLookahead;
    std::vector<Var> baseline_estimates;   // Rhat_t graph nodes
    std::vector<Real> advantages;          // (R - Rhat_t) as constants
};

inline RewardRecord make_reward_record(Graph& g, const BaselineHead& head,
                                       const Trajectory& traj, Real reward, RewardMode mode) {
    RewardRecord rec;
    rec.reward = reward;
    rec.mode = mode;
    rec.baseline_estimates.reserve(traj.states.size());
    rec.advantages.reserve(traj.states.size());
    for (const Var& m_t : traj.states) {
        Var rhat = head.estimate(g, m_t);
        rec.baseline_estimates.push_back(rhat);
        rec.advantages.push_back(reward - rhat.item());
    }
    return rec;
}

// L_b = (1/T) sum_t (R - Rhat_t)^2. Gradients reach only W_r and b_r.
inline Var baseline_loss(Graph& g, const RewardRecord& rec) {
    if (rec.baseline_estimates.empty()) throw DataError("baseline_loss: empty trajectory");
    Var total;
    for (const Var& rhat : rec.baseline_estimates) {
        Var diff = g.rsub_const(rec.reward, rhat);
        Var sq = g.mul(diff, diff);
        total = total.valid() ? g.add(total, sq) : sq;
    }
    return g.scale(total, Real(1) / static_cast<Real>(rec.baseline_estimates.size()));
}

// L_RL = -(1/T) sum_t (R - Rhat_t) log P(y^s_t), advantages constant.
inline Var rl_loss(Graph& g, const Trajectory& traj, const RewardRecord& rec) {
    if (traj.log_probs.empty()) throw DataError("rl_loss: empty trajectory");
    if (traj.log_probs.size() != rec.advantages.size()) {
        throw ShapeError("rl_loss: trajectory length " + std::to_string(traj.log_probs.size()) +
                         " does not match advantage count " +
                         std::to_string(rec.advantages.size()));
    }
    Var total;
    for (std::size_t t = 0; t < traj.log_probs.size(); ++t) {
        Var term = g.scale(traj.log_probs[t], -rec.advantages[t]);
        total = total.valid() ? g.add(total, term) : term;
    }
    return g.scale(total, Real(1) / static_cast<Real>(traj.log_probs.size()));
}

// L_mixed = lambda * L_RL + (1 - lambda) * L_MLE.
inline Var mixed_loss(Graph& g, Var l_rl, Var l_mle, Real lambda) {
    if (lambda < Real(0) || lambda > Real(1)) {
        throw UsageError("lambda must be in [0, 1], got " + std::to_string(lambda));
    }
    return g.add(g.scale(l_rl, lambda), g.scale(l_mle, Real(1) - lambda));
}

// Cross-entropy of the K-way emotion head over the encoder final state.
inline Var emotion_loss(PolicyNet& net, Var encoder_final, int label) {
    Graph& g = net.graph();
    Var logits = net.emotion_logits(encoder_final);
    return g.scale(g.log_softmax_pick(logits, label), Real(-1));
}

// Terminal reward for a sampled response. CURRENT scores the response's own
// sentiment; LOOKAHEAD scores the predicted sentiment of the user's next
// turn given [user_turn; <sep>; response]. An empty response is neutral.
inline Real compute_reward(RewardMode mode, const std::string& user_turn,
                           const std::string& sampled_response,
                           const SentimentModel* classifier, const SentimentModel* predictor) {
    if (tokenize(sampled_response).empty()) return Real(0.5);
    if (mode == RewardMode::kCurrent) {
        if (!classifier) throw PreconditionError("current-sentiment reward needs a classifier");
        return classify(*classifier, sampled_response);
    }
    if (!predictor) throw PreconditionError("look-ahead reward needs a sentiment predictor");
    return predict_lookahead(*predictor, lookahead_context(user_turn, sampled_response));
}

}  // namespace lookahead
