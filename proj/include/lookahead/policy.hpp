#pragma once

// The policy network: Bi-GRU encoder, GRU decoder with dot-product attention
// and temperature softmax, with the embedding matrix and the output
// projection tied to one storage object.
//
// Each Bi-GRU direction has width hidden_dim; per-position states are the
// linear projection of the two-direction concatenation back down to
// hidden_dim, so encoder states and decoder states share the dimension the
// dot-product attention requires. The decoder starts from a projection of
// the concatenated final forward/backward states. The decoder input at step
// t is the embedding of the previous token only; the attentional state m*
// feeds the output layer, not the next step.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lookahead/checkpoint.hpp"
#include "lookahead/common.hpp"
#include "lookahead/graph.hpp"
#include "lookahead/nn.hpp"
#include "lookahead/vocabulary.hpp"

namespace lookahead {

struct PolicyConfig {
    int embed_dim = 64;  // hidden size is tied to this (weight tying)
    Real temperature = 0.4;
    int max_context_len = 40;
    int max_decode_len = 20;
    int n_emotions = 0;  // > 0 adds the emotion classification head

    int hidden_dim() const { return embed_dim; }

    void validate() const {
        if (embed_dim <= 0) throw UsageError("embed_dim must be positive");
        if (!(temperature > Real(0))) throw UsageError("temperature must be > 0");
        if (max_decode_len <= 0) throw UsageError("max_decode_len must be positive");
    }

    nlohmann::json to_json() const {
        return {{"embed_dim", embed_dim},
                {"temperature", temperature},
                {"max_context_len", max_context_len},
                {"max_decode_len", max_decode_len},
                {"n_emotions", n_emotions}};
    }

    static PolicyConfig from_json(const nlohmann::json& j) {
        PolicyConfig c;
        c.embed_dim = j.at("embed_dim").get<int>();
        c.temperature = j.at("temperature").get<Real>();
        c.max_context_len = j.value("max_context_len", 40);
        c.max_decode_len = j.at("max_decode_len").get<int>();
        c.n_emotions = j.value("n_emotions", 0);
        return c;
    }
};

struct EncoderOutput {
    Var h;            // M x hidden matrix of per-position states
    Var final_state;  // decoder initial state
    std::vector<Var> h_rows;
    std::vector<Var> forward_states;   // per-direction states, kept for tests
    std::vector<Var> backward_states;  // backward_states[i] belongs to position i
    int length = 0;
};

struct DecoderStep {
    Var m;              // decoder hidden state m_t
    Var attention;      // a_t over the M source positions
    Var context;        // c_t
    Var attentional;    // m_t^* = tanh(Wc [c_t; m_t])
    Var scaled_logits;  // (V m_t^* + b) / tau
    Var p_vocab;        // softmax(scaled_logits)
};

struct Trajectory {
    std::vector<int> tokens;     // sampled actions, including a sampled EOS
    std::vector<Var> log_probs;  // log P(y_t) at the sampled ids
    std::vector<Var> states;     // m_t per step, for the baseline reward model
    bool ended_with_eos = false;

    std::vector<int> surface() const {
        std::vector<int> out = tokens;
        if (ended_with_eos && !out.empty()) out.pop_back();
        return out;
    }
};

// Parameter storage plus vocabulary for one policy. Forward passes are built
// by PolicyNet views bound to a per-step Graph.
class PolicyModel {
  public:
    PolicyModel() = default;

    PolicyModel(PolicyConfig config, Vocabulary vocab, std::uint64_t seed)
        : config_(config), vocab_(std::move(vocab)) {
        config_.validate();
        const int d = config_.embed_dim;
        const int v = vocab_.size();
        Rng rng(seed);
        detail::init_uniform(store_.create("embed", {v, d}).value, rng, 0.08);
        store_.create("out.b", {v});
        detail::create_gru_params(store_, "enc.fwd", d, d, rng);
        detail::create_gru_params(store_, "enc.bwd", d, d, rng);
        detail::init_glorot(store_.create("enc.proj.W", {d, 2 * d}).value, rng);
        store_.create("enc.proj.b", {d});
        detail::init_glorot(store_.create("enc.init.W", {d, 2 * d}).value, rng);
        store_.create("enc.init.b", {d});
        detail::create_gru_params(store_, "dec", d, d, rng);
        detail::init_glorot(store_.create("attn.Wc", {d, 2 * d}).value, rng);
        if (config_.n_emotions > 0) {
            detail::init_glorot(store_.create("emo.W", {config_.n_emotions, d}).value, rng);
            store_.create("emo.b", {config_.n_emotions});
        }
    }

    // Overwrites embedding rows for vocabulary tokens found in a text file of
    // "token v_1 ... v_d" lines. Unlisted tokens keep their random init.
    void load_external_embeddings(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open embedding file: " + path);
        auto& embed = store_.get("embed").value;
        std::string line;
        long loaded = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ss(line);
            std::string token;
            ss >> token;
            std::vector<Real> vec;
            Real v;
            while (ss >> v) vec.push_back(v);
            if (vec.empty()) continue;  // header line of word2vec text format
            if (static_cast<int>(vec.size()) != config_.embed_dim) {
                throw DataError("embedding file dimension " + std::to_string(vec.size()) +
                                " does not match embed_dim " + std::to_string(config_.embed_dim));
            }
            if (!vocab_.contains(token)) continue;
            const int id = vocab_.id_of(token);
            for (int j = 0; j < config_.embed_dim; ++j) {
                embed.at(id, j) = vec[static_cast<std::size_t>(j)];
            }
            ++loaded;
        }
        (void)loaded;
    }

    const PolicyConfig& config() const { return config_; }
    const Vocabulary& vocab() const { return vocab_; }
    ParameterStore& store() { return store_; }
    const ParameterStore& store() const { return store_; }

    void save(const std::string& path, const nlohmann::json& extra = nlohmann::json::object()) const {
        save_checkpoint(path, "policy", config_.to_json(), vocab_, store_, extra);
    }

    static PolicyModel load(const std::string& path) {
        Checkpoint ck = load_checkpoint(path);
        if (ck.kind != "policy") {
            throw DataError("expected a policy checkpoint, got kind '" + ck.kind + "': " + path);
        }
        PolicyModel m;
        m.config_ = PolicyConfig::from_json(ck.config);
        m.vocab_ = std::move(ck.vocab);
        m.store_ = std::move(ck.store);
        return m;
    }

    // Adds the linear baseline reward parameters when absent (RL variants).
    void ensure_baseline_params() {
        if (!store_.contains("baseline.w")) {
            store_.create("baseline.w", {config_.hidden_dim()});
            store_.create("baseline.b", {1});
        }
    }

  private:
    PolicyConfig config_;
    Vocabulary vocab_;
    ParameterStore store_;
};

// One graph's bound view of the policy parameters.
class PolicyNet {
  public:
    PolicyNet(Graph& g, PolicyModel& model)
        : g_(g),
          config_(model.config()),
          embed_(g.param(model.store().get("embed"))),
          out_b_(g.param(model.store().get("out.b"))),
          enc_fwd_(GruCell::bind(g, model.store(), "enc.fwd")),
          enc_bwd_(GruCell::bind(g, model.store(), "enc.bwd")),
          enc_proj_w_(g.param(model.store().get("enc.proj.W"))),
          enc_proj_b_(g.param(model.store().get("enc.proj.b"))),
          enc_init_w_(g.param(model.store().get("enc.init.W"))),
          enc_init_b_(g.param(model.store().get("enc.init.b"))),
          dec_(GruCell::bind(g, model.store(), "dec")),
          attn_wc_(g.param(model.store().get("attn.Wc"))) {
        if (model.store().contains("emo.W")) {
            emo_w_ = g.param(model.store().get("emo.W"));
            emo_b_ = g.param(model.store().get("emo.b"));
        }
    }

    Graph& graph() { return g_; }
    const PolicyConfig& config() const { return config_; }
    Var embedding_table() const { return embed_; }

    EncoderOutput encode(const std::vector<int>& context) {
        if (context.empty()) throw DataError("encode: empty input context");
        const int m = static_cast<int>(context.size());
        const int d = config_.hidden_dim();

        EncoderOutput out;
        out.length = m;
        Var h = zeros(d);
        for (int i = 0; i < m; ++i) {
            h = gru_cell(g_, enc_fwd_, g_.embedding_row(embed_, context[static_cast<std::size_t>(i)]), h);
            out.forward_states.push_back(h);
        }
        out.backward_states.assign(static_cast<std::size_t>(m), Var{});
        h = zeros(d);
        for (int i = m - 1; i >= 0; --i) {
            h = gru_cell(g_, enc_bwd_, g_.embedding_row(embed_, context[static_cast<std::size_t>(i)]), h);
            out.backward_states[static_cast<std::size_t>(i)] = h;
        }
        for (int i = 0; i < m; ++i) {
            auto both = g_.concat(out.forward_states[static_cast<std::size_t>(i)],
                                  out.backward_states[static_cast<std::size_t>(i)]);
            out.h_rows.push_back(g_.add(g_.matmul(enc_proj_w_, both), enc_proj_b_));
        }
        out.h = g_.stack_rows(out.h_rows);
        auto ends = g_.concat(out.forward_states.back(), out.backward_states.front());
        out.final_state = g_.add(g_.matmul(enc_init_w_, ends), enc_init_b_);
        return out;
    }

    // Eqs: e_i = h_i . m_t; a = softmax(e); c = sum_i a_i h_i;
    // m* = tanh(Wc [c; m]).
    void attend(Var m_t, const EncoderOutput& enc, Var* attention, Var* context,
                Var* attentional) {
        auto energies = g_.matmul(enc.h, m_t);
        *attention = g_.softmax(energies);
        *context = g_.weighted_sum_rows(enc.h, *attention);
        *attentional = g_.tanh_op(g_.matmul(attn_wc_, g_.concat(*context, m_t)));
    }

    // P_vocab = softmax((V m* + b) / tau) with V the embedding transpose.
    Var scaled_logits(Var attentional) {
        auto logits = g_.add(g_.matmul(embed_, attentional), out_b_);
        return g_.scale(logits, Real(1) / config_.temperature);
    }

    DecoderStep decode_step(const EncoderOutput& enc, Var m_prev, int prev_token) {
        DecoderStep step;
        step.m = gru_cell(g_, dec_, g_.embedding_row(embed_, prev_token), m_prev);
        attend(step.m, enc, &step.attention, &step.context, &step.attentional);
        step.scaled_logits = scaled_logits(step.attentional);
        step.p_vocab = g_.softmax(step.scaled_logits);
        return step;
    }

    Var emotion_logits(Var encoder_final) {
        if (!emo_w_.valid()) throw PreconditionError("model has no emotion head");
        return g_.add(g_.matmul(emo_w_, encoder_final), emo_b_);
    }

    Var zeros(int n) { return g_.constant(Tensor({n})); }

  private:
    Graph& g_;
    PolicyConfig config_;
    Var embed_, out_b_;
    GruCell enc_fwd_, enc_bwd_;
    Var enc_proj_w_, enc_proj_b_, enc_init_w_, enc_init_b_;
    GruCell dec_;
    Var attn_wc_;
    Var emo_w_, emo_b_;
};

// Argmax with ties broken toward the lowest id.
inline int argmax_token(const Tensor& p) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(p.numel()); ++i) {
        if (p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(best)]) best = i;
    }
    return best;
}

// Greedy decoding: starts from SOS, stops at EOS or max_decode_len. The
// returned surface excludes EOS. Pure function of (parameters, context).
inline std::vector<int> decode_greedy(PolicyModel& model, const std::vector<int>& context) {
    Graph g;
    PolicyNet net(g, model);
    EncoderOutput enc = net.encode(context);
    Var m = enc.final_state;
    int prev = Vocabulary::kSosId;
    std::vector<int> out;
    for (int t = 0; t < model.config().max_decode_len; ++t) {
        DecoderStep step = net.decode_step(enc, m, prev);
        const int token = argmax_token(step.p_vocab.value());
        if (token == Vocabulary::kEosId) break;
        out.push_back(token);
        prev = token;
        m = step.m;
    }
    return out;
}

// Multinomial sampling from the temperature softmax, recording per-step
// log-probabilities and decoder states on the caller's graph. Deterministic
// given the rng state.
inline Trajectory decode_sample(PolicyNet& net, const EncoderOutput& enc, Rng& rng) {
    Trajectory traj;
    Var m = enc.final_state;
    int prev = Vocabulary::kSosId;
    for (int t = 0; t < net.config().max_decode_len; ++t) {
        DecoderStep step = net.decode_step(enc, m, prev);
        const int token = static_cast<int>(rng.multinomial(step.p_vocab.value().values()));
        traj.tokens.push_back(token);
        traj.log_probs.push_back(net.graph().log_softmax_pick(step.scaled_logits, token));
        traj.states.push_back(step.m);
        if (token == Vocabulary::kEosId) {
            traj.ended_with_eos = true;
            break;
        }
        prev = token;
        m = step.m;
    }
    return traj;
}

inline Trajectory decode_sample(PolicyModel& model, const std::vector<int>& context, Rng& rng,
                                Graph& g) {
    PolicyNet net(g, model);
    EncoderOutput enc = net.encode(context);
    return decode_sample(net, enc, rng);
}

// Walks a fixed token sequence through the decoder, recording the same
// per-step quantities decode_sample records: scores a given continuation.
inline Trajectory replay_tokens(PolicyNet& net, const EncoderOutput& enc,
                                const std::vector<int>& tokens) {
    Trajectory traj;
    Var m = enc.final_state;
    int prev = Vocabulary::kSosId;
    for (int token : tokens) {
        DecoderStep step = net.decode_step(enc, m, prev);
        traj.tokens.push_back(token);
        traj.log_probs.push_back(net.graph().log_softmax_pick(step.scaled_logits, token));
        traj.states.push_back(step.m);
        prev = token;
        m = step.m;
    }
    traj.ended_with_eos = !tokens.empty() && tokens.back() == Vocabulary::kEosId;
    return traj;
}

}  // namespace lookahead
