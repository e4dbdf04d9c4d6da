#pragma once

// The reward side: a binary sentiment classifier over single utterances, a
// self-labeling pass over dialogues, and a look-ahead sentiment predictor
// over flattened [u_i; <sep>; s_i] contexts.
//
// Both models are a single-layer uni-directional GRU over learned embeddings
// with a logistic head on the last state. Each builds its own vocabulary
// from its own training text, independent of the policy vocabulary. The
// head is zero-initialized, so an untrained model scores exactly 0.5.

#include <algorithm>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lookahead/checkpoint.hpp"
#include "lookahead/common.hpp"
#include "lookahead/dialogue.hpp"
#include "lookahead/graph.hpp"
#include "lookahead/nn.hpp"
#include "lookahead/optimizer.hpp"
#include "lookahead/tokenizer.hpp"
#include "lookahead/vocabulary.hpp"

namespace lookahead {

enum class SentimentKind { kClassifier, kPredictor };

inline const char* sentiment_kind_name(SentimentKind k) {
    return k == SentimentKind::kClassifier ? "classifier" : "predictor";
}

struct SentimentExample {
    std::string text;
    int label = 0;  // 0 = NEGATIVE, 1 = POSITIVE
};

struct SentimentConfig {
    int embed_dim = 32;
    int hidden_dim = 64;
    Real learning_rate = Real(1e-3);
    int epochs = 12;
    int batch_size = 16;
    double heldout_fraction = 0.1;
    long min_freq = 1;
    std::size_t max_vocab = 5000;
    std::uint64_t seed = 1;

    nlohmann::json to_json() const {
        return {{"embed_dim", embed_dim},       {"hidden_dim", hidden_dim},
                {"learning_rate", learning_rate}, {"epochs", epochs},
                {"batch_size", batch_size},     {"heldout_fraction", heldout_fraction},
                {"min_freq", min_freq},         {"max_vocab", max_vocab},
                {"seed", seed}};
    }

    static SentimentConfig from_json(const nlohmann::json& j) {
        SentimentConfig c;
        c.embed_dim = j.at("embed_dim").get<int>();
        c.hidden_dim = j.at("hidden_dim").get<int>();
        c.learning_rate = j.at("learning_rate").get<Real>();
        c.epochs = j.at("epochs").get<int>();
        c.batch_size = j.at("batch_size").get<int>();
        c.heldout_fraction = j.at("heldout_fraction").get<double>();
        c.min_freq = j.at("min_freq").get<long>();
        c.max_vocab = j.at("max_vocab").get<std::size_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
        return c;
    }
};

class SentimentModel {
  public:
    SentimentModel() = default;

    SentimentModel(SentimentKind kind, SentimentConfig config, Vocabulary vocab)
        : kind_(kind), config_(config), vocab_(std::move(vocab)) {
        Rng rng(config_.seed);
        detail::init_uniform(store_.create("embed", {vocab_.size(), config_.embed_dim}).value,
                             rng, 0.08);
        detail::create_gru_params(store_, "gru", config_.embed_dim, config_.hidden_dim, rng);
        store_.create("head.w", {config_.hidden_dim});  // zero: untrained model scores 0.5
        store_.create("head.b", {1});
    }

    SentimentKind kind() const { return kind_; }
    const SentimentConfig& config() const { return config_; }
    const Vocabulary& vocab() const { return vocab_; }
    ParameterStore& store() { return store_; }
    const ParameterStore& store() const { return store_; }

    // Builds the encoder + head on the caller's graph; returns the logit.
    Var logit(Graph& g, const std::vector<int>& ids) const {
        auto& store = const_cast<ParameterStore&>(store_);
        auto embed = g.param(store.get("embed"));
        auto cell = GruCell::bind(g, store, "gru");
        Var h = g.constant(Tensor({config_.hidden_dim}));
        for (int id : ids) h = gru_cell(g, cell, g.embedding_row(embed, id), h);
        auto w = g.param(store.get("head.w"));
        auto b = g.param(store.get("head.b"));
        return g.add(g.dot(w, h), g.pick(b, 0));
    }

    // P(POSITIVE); strictly inside (0, 1). Empty token sequences score the
    // head bias alone (0.5 untrained).
    Real score_ids(const std::vector<int>& ids) const {
        Graph g;
        if (ids.empty()) {
            const Real b = store_.get("head.b").value[0];
            return Graph::sigmoid_scalar(b);
        }
        return Graph::sigmoid_scalar(logit(g, ids).item());
    }

    Real score_text(const std::string& text) const {
        return score_ids(vocab_.encode(tokenize(text)));
    }

    void save(const std::string& path) const {
        save_checkpoint(path, "sentiment", config_.to_json(), vocab_, store_,
                        {{"sentiment_kind", sentiment_kind_name(kind_)}});
    }

    static SentimentModel load(const std::string& path) {
        Checkpoint ck = load_checkpoint(path);
        if (ck.kind != "sentiment") {
            throw DataError("expected a sentiment checkpoint, got kind '" + ck.kind + "': " +
                            path);
        }
        SentimentModel m;
        const std::string kind = ck.extra.at("sentiment_kind").get<std::string>();
        if (kind == "classifier") {
            m.kind_ = SentimentKind::kClassifier;
        } else if (kind == "predictor") {
            m.kind_ = SentimentKind::kPredictor;
        } else {
            throw DataError("unknown sentiment kind '" + kind + "': " + path);
        }
        m.config_ = SentimentConfig::from_json(ck.config);
        m.vocab_ = std::move(ck.vocab);
        m.store_ = std::move(ck.store);
        return m;
    }

  private:
    SentimentKind kind_ = SentimentKind::kClassifier;
    SentimentConfig config_;
    Vocabulary vocab_;
    ParameterStore store_;
};

struct SentimentTrainReport {
    double heldout_accuracy = 0.0;
    double train_loss_before = 0.0;
    double train_loss_after = 0.0;
    std::size_t train_examples = 0;
    std::size_t heldout_examples = 0;
};

inline SentimentModel train_sentiment(const std::vector<SentimentExample>& examples,
                                      const SentimentConfig& config, SentimentKind kind,
                                      SentimentTrainReport* report_out = nullptr) {
    if (examples.size() < 2) throw DataError("sentiment training needs at least 2 examples");
    bool has_pos = false, has_neg = false;
    for (const auto& ex : examples) {
        if (ex.label == 1) has_pos = true;
        else if (ex.label == 0) has_neg = true;
        else throw DataError("sentiment label must be 0 or 1");
        if (tokenize(ex.text).empty()) {
            throw DataError("sentiment example is empty after tokenization: '" + ex.text + "'");
        }
    }
    if (!has_pos || !has_neg) {
        throw DataError("sentiment training data contains a single class only");
    }

    std::map<std::string, long> counts;
    for (const auto& ex : examples) {
        for (const auto& tok : tokenize(ex.text)) ++counts[tok];
    }
    SentimentModel model(kind, config,
                         Vocabulary::build(counts, config.min_freq, config.max_vocab));

    std::vector<std::pair<std::vector<int>, int>> encoded;
    encoded.reserve(examples.size());
    for (const auto& ex : examples) {
        encoded.emplace_back(model.vocab().encode(tokenize(ex.text)), ex.label);
    }
    Rng rng(config.seed ^ 0x5e17ull);
    rng.shuffle(encoded);
    std::size_t heldout = static_cast<std::size_t>(
        static_cast<double>(encoded.size()) * config.heldout_fraction);
    heldout = std::min(std::max<std::size_t>(heldout, 1), encoded.size() - 1);
    const std::vector<std::pair<std::vector<int>, int>> eval_split(encoded.end() - heldout,
                                                                   encoded.end());
    std::vector<std::pair<std::vector<int>, int>> train_split(encoded.begin(),
                                                              encoded.end() - heldout);

    auto mean_train_loss = [&] {
        double total = 0;
        for (const auto& [ids, label] : train_split) {
            Graph g;
            total += g.bce_logit(model.logit(g, ids), static_cast<Real>(label)).item();
        }
        return total / static_cast<double>(train_split.size());
    };

    SentimentTrainReport report;
    report.train_examples = train_split.size();
    report.heldout_examples = eval_split.size();
    report.train_loss_before = mean_train_loss();

    Adam opt(config.learning_rate);
    std::vector<std::size_t> order(train_split.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        std::size_t i = 0;
        while (i < order.size()) {
            model.store().zero_grads();
            const std::size_t end = std::min(order.size(), i + static_cast<std::size_t>(config.batch_size));
            for (; i < end; ++i) {
                const auto& [ids, label] = train_split[order[i]];
                Graph g;
                auto loss = g.bce_logit(model.logit(g, ids), static_cast<Real>(label));
                g.backward(loss);
            }
            opt.step(model.store());
        }
    }
    report.train_loss_after = mean_train_loss();

    long correct = 0;
    for (const auto& [ids, label] : eval_split) {
        const int predicted = model.score_ids(ids) >= Real(0.5) ? 1 : 0;
        correct += (predicted == label);
    }
    report.heldout_accuracy =
        static_cast<double>(correct) / static_cast<double>(eval_split.size());
    if (report_out) *report_out = report;
    return model;
}

inline Real classify(const SentimentModel& model, const std::string& utterance) {
    if (model.kind() != SentimentKind::kClassifier) {
        throw PreconditionError("classify requires a CLASSIFIER sentiment model");
    }
    return model.score_text(utterance);
}

// Reward scalar R in (0, 1): predicted probability of a POSITIVE next user
// turn given the flattened context "u <sep> s".
inline Real predict_lookahead(const SentimentModel& model, const std::string& context) {
    if (model.kind() != SentimentKind::kPredictor) {
        throw PreconditionError("predict_lookahead requires a PREDICTOR sentiment model");
    }
    return model.score_text(context);
}

inline std::string lookahead_context(const std::string& user_turn,
                                     const std::string& system_turn) {
    return user_turn + " " + tokens::kSep + " " + system_turn;
}

struct LabeledContext {
    std::string context;  // "u_i <sep> s_i"
    int label = 0;        // 1[classify(u_{i+1}) >= threshold]
    double prob = 0.0;    // classifier probability before thresholding
};

// Self-labeling pass: one record per user turn that follows a (u_i, s_i)
// pair; dialogue-initial user turns are skipped. Emits exactly
// sum_d max(0, user_turns(d) - 1) records over valid dialogues.
inline std::vector<LabeledContext> label_corpus(const SentimentModel& classifier,
                                                const std::vector<Dialogue>& corpus,
                                                double threshold = 0.5) {
    if (classifier.kind() != SentimentKind::kClassifier) {
        throw PreconditionError("label_corpus requires a CLASSIFIER sentiment model");
    }
    std::vector<LabeledContext> out;
    for (const auto& d : corpus) {
        for (std::size_t next_user = 2; next_user < d.turns.size(); next_user += 2) {
            LabeledContext rec;
            rec.context = lookahead_context(d.turns[next_user - 2].text,
                                            d.turns[next_user - 1].text);
            rec.prob = static_cast<double>(classify(classifier, d.turns[next_user].text));
            rec.label = rec.prob >= threshold ? 1 : 0;
            out.push_back(std::move(rec));
        }
    }
    return out;
}

inline SentimentModel train_predictor(const std::vector<LabeledContext>& labeled,
                                      const SentimentConfig& config,
                                      SentimentTrainReport* report_out = nullptr) {
    std::vector<SentimentExample> examples;
    examples.reserve(labeled.size());
    for (const auto& rec : labeled) examples.push_back({rec.context, rec.label});
    return train_sentiment(examples, config, SentimentKind::kPredictor, report_out);
}

// ---- labeled-context JSONL ({"context": str, "label": 0|1, "prob": float}) ----

inline void save_labeled_contexts(const std::vector<LabeledContext>& labeled,
                                  const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open labels file for writing: " + path);
    for (const auto& rec : labeled) {
        nlohmann::json j;
        j["context"] = rec.context;
        j["label"] = rec.label;
        j["prob"] = rec.prob;
        out << j.dump() << '\n';
    }
    if (!out) throw DataError("error writing labels file: " + path);
}

inline std::vector<LabeledContext> load_labeled_contexts(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw PreconditionError("labels file not found (run label-sentiment first): " + path);
    }
    std::vector<LabeledContext> out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            LabeledContext rec;
            rec.context = j.at("context").get<std::string>();
            rec.label = j.at("label").get<int>();
            rec.prob = j.value("prob", 0.0);
            out.push_back(std::move(rec));
        } catch (const std::exception& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": malformed record: " +
                            e.what());
        }
    }
    return out;
}

}  // namespace lookahead
