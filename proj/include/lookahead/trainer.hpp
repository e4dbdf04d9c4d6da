#pragma once

// Training loops for the four model variants:
//
//   seq2seq      minimize L_MLE
//   multiseq     minimize L_MLE + emotion cross-entropy (unit weight)
//   rl-current   minimize L_mixed + L_b, reward = classifier(y^s)
//   rl-lookahead minimize L_mixed + L_b, reward = predictor([u; <sep>; y^s])
//
// RL variants must start from a pre-trained seq2seq checkpoint and sample
// one trajectory per context. The baseline is optimized jointly with the
// policy in the same backward pass but over its own gradient path. Runs are
// fully deterministic given the seed.

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lookahead/common.hpp"
#include "lookahead/dialogue.hpp"
#include "lookahead/losses.hpp"
#include "lookahead/optimizer.hpp"
#include "lookahead/policy.hpp"
#include "lookahead/sentiment.hpp"

namespace lookahead {

enum class Variant { kSeq2Seq, kMultiSeq, kRlCurrent, kRlLookahead };

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::kSeq2Seq: return "seq2seq";
        case Variant::kMultiSeq: return "multiseq";
        case Variant::kRlCurrent: return "rl-current";
        case Variant::kRlLookahead: return "rl-lookahead";
    }
    return "?";
}

inline Variant variant_from_name(const std::string& name) {
    if (name == "seq2seq") return Variant::kSeq2Seq;
    if (name == "multiseq") return Variant::kMultiSeq;
    if (name == "rl-current") return Variant::kRlCurrent;
    if (name == "rl-lookahead") return Variant::kRlLookahead;
    throw UsageError("unknown variant '" + name +
                     "' (expected seq2seq|multiseq|rl-current|rl-lookahead)");
}

inline bool is_rl_variant(Variant v) {
    return v == Variant::kRlCurrent || v == Variant::kRlLookahead;
}

struct TrainOptions {
    Variant variant = Variant::kSeq2Seq;
    Real lambda = Real(0.25);
    Real learning_rate = Real(1e-3);
    int epochs = 20;
    int batch_size = 16;
    std::uint64_t seed = 1;
    // set when the model was initialized from a pre-trained checkpoint;
    // RL variants refuse to run otherwise
    bool initialized_from_checkpoint = false;
    std::vector<std::string> emotion_labels;  // multiseq label order
    int checkpoint_every = 0;                 // epochs between checkpoints; 0 = none
    std::string checkpoint_path;              // cadence checkpoints: <path>.epoch<N>
    std::string metrics_path;                 // per-epoch JSONL; empty = don't write
};

struct EpochMetrics {
    int epoch = 0;
    std::string variant;
    double mle_loss = 0.0;
    std::optional<double> emotion_loss;
    std::optional<double> rl_loss;
    std::optional<double> baseline_loss;
    std::optional<double> mean_reward;
    std::optional<double> mean_resp_len;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["epoch"] = epoch;
        j["variant"] = variant;
        j["mle_loss"] = mle_loss;
        if (emotion_loss) j["emotion_loss"] = *emotion_loss;
        if (rl_loss) j["rl_loss"] = *rl_loss;
        if (baseline_loss) j["baseline_loss"] = *baseline_loss;
        if (mean_reward) j["mean_reward"] = *mean_reward;
        if (mean_resp_len) j["mean_resp_len"] = *mean_resp_len;
        return j;
    }
};

struct TrainRun {
    Variant variant = Variant::kSeq2Seq;
    std::vector<EpochMetrics> epochs;

    const EpochMetrics& final_epoch() const {
        if (epochs.empty()) throw std::logic_error("no epochs recorded");
        return epochs.back();
    }
};

inline int emotion_label_id(const std::vector<std::string>& labels,
                            const std::optional<std::string>& emotion) {
    if (!emotion) return -1;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == *emotion) return static_cast<int>(i);
    }
    return -1;
}

inline TrainRun train(PolicyModel& model, const std::vector<TrainingExample>& examples,
                      const TrainOptions& opts, const SentimentModel* classifier = nullptr,
                      const SentimentModel* predictor = nullptr) {
    if (examples.empty()) throw DataError("training set is empty");
    if (is_rl_variant(opts.variant)) {
        if (!opts.initialized_from_checkpoint) {
            throw PreconditionError(
                "RL variants require initialization from a pre-trained seq2seq checkpoint");
        }
        if (opts.variant == Variant::kRlCurrent && !classifier) {
            throw PreconditionError("rl-current requires a trained sentiment classifier");
        }
        if (opts.variant == Variant::kRlLookahead && !predictor) {
            throw PreconditionError("rl-lookahead requires a trained sentiment predictor");
        }
        model.ensure_baseline_params();
    }
    if (opts.variant == Variant::kMultiSeq && !model.store().contains("emo.W")) {
        throw PreconditionError("multiseq requires a model built with an emotion head");
    }
    const RewardMode mode =
        opts.variant == Variant::kRlCurrent ? RewardMode::kCurrent : RewardMode::kLookahead;

    std::ofstream metrics_out;
    if (!opts.metrics_path.empty()) {
        metrics_out.open(opts.metrics_path, std::ios::binary);
        if (!metrics_out) throw DataError("cannot open metrics file: " + opts.metrics_path);
    }

    Adam opt(opts.learning_rate);
    Rng rng(opts.seed);
    std::vector<std::size_t> order(examples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainRun run;
    run.variant = opts.variant;
    for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
        rng.shuffle(order);
        double sum_mle = 0, sum_emo = 0, sum_rl = 0, sum_base = 0, sum_reward = 0, sum_len = 0;
        long n_emo = 0;

        std::size_t i = 0;
        while (i < order.size()) {
            const std::size_t end =
                std::min(order.size(), i + static_cast<std::size_t>(opts.batch_size));
            const Real inv_batch = Real(1) / static_cast<Real>(end - i);
            model.store().zero_grads();
            for (; i < end; ++i) {
                const TrainingExample& ex = examples[order[i]];
                Graph g;
                PolicyNet net(g, model);
                EncoderOutput enc = net.encode(ex.context_tokens);
                Var l_mle = mle_loss(net, enc, ex.target_tokens);
                sum_mle += l_mle.item();

                Var total = l_mle;
                if (opts.variant == Variant::kMultiSeq) {
                    const int label = emotion_label_id(opts.emotion_labels, ex.emotion);
                    if (label >= 0) {
                        Var l_emo = emotion_loss(net, enc.final_state, label);
                        sum_emo += l_emo.item();
                        ++n_emo;
                        total = g.add(total, l_emo);  // "simply added": unit weight
                    }
                } else if (is_rl_variant(opts.variant)) {
                    Trajectory traj = decode_sample(net, enc, rng);
                    const std::string response = model.vocab().decode_text(traj.surface());
                    const Real reward =
                        compute_reward(mode, ex.user_text, response, classifier, predictor);
                    BaselineHead head = BaselineHead::bind(g, model.store());
                    RewardRecord rec = make_reward_record(g, head, traj, reward, mode);
                    Var l_b = baseline_loss(g, rec);
                    Var l_rl = rl_loss(g, traj, rec);
                    sum_rl += l_rl.item();
                    sum_base += l_b.item();
                    sum_reward += reward;
                    sum_len += static_cast<double>(traj.surface().size());
                    total = g.add(mixed_loss(g, l_rl, l_mle, opts.lambda), l_b);
                }
                g.backward(g.scale(total, inv_batch));
            }
            opt.step(model.store());
        }

        const double n = static_cast<double>(examples.size());
        EpochMetrics m;
        m.epoch = epoch;
        m.variant = variant_name(opts.variant);
        m.mle_loss = sum_mle / n;
        if (opts.variant == Variant::kMultiSeq && n_emo > 0) {
            m.emotion_loss = sum_emo / static_cast<double>(n_emo);
        }
        if (is_rl_variant(opts.variant)) {
            m.rl_loss = sum_rl / n;
            m.baseline_loss = sum_base / n;
            m.mean_reward = sum_reward / n;
            m.mean_resp_len = sum_len / n;
        }
        if (metrics_out) metrics_out << m.to_json().dump() << '\n';
        run.epochs.push_back(std::move(m));

        if (opts.checkpoint_every > 0 && epoch % opts.checkpoint_every == 0 &&
            !opts.checkpoint_path.empty()) {
            model.save(opts.checkpoint_path + ".epoch" + std::to_string(epoch));
        }
    }
    return run;
}

}  // namespace lookahead
