#pragma once

// Flat JSON run configuration. Every hyperparameter has a default; a config
// file overrides defaults, command-line "--key value" flags override the
// file, and unknown keys are rejected. The fully merged ("effective")
// config is written next to every artifact a command produces.
//
// Desk-scale defaults keep the full pipeline in CPU-minutes; the
// paper-scale values (embed/hidden 300) are one config edit away.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lookahead/common.hpp"

namespace lookahead {

struct Config {
    // seeding: one master seed; each pipeline phase derives its own stream
    std::uint64_t seed = 1;

    // synthetic corpus
    long n_dialogues = 500;
    long n_emotions = 4;
    double empathetic_prob = 0.52;
    double train_frac = 0.8;
    double dev_frac = 0.1;

    // vocabulary
    long min_freq = 1;
    long max_vocab = 5000;

    // policy model (paper-scale: embed_dim 300)
    long embed_dim = 64;
    double temperature = 0.4;
    long max_context_len = 40;
    long max_target_len = 20;
    long max_decode_len = 20;
    std::string embedding_file;  // optional external embedding init

    // training
    double learning_rate = 1e-3;
    double rl_learning_rate = 5e-3;
    double lambda = 0.25;
    long batch_size = 16;
    long policy_epochs = 24;
    long rl_epochs = 24;
    long checkpoint_every = 0;  // epochs between cadence checkpoints, 0 = none
    bool train_multiseq = true;

    // sentiment models
    long sent_embed_dim = 32;
    long sent_hidden_dim = 64;
    double sent_learning_rate = 1e-3;
    long sent_epochs = 12;
    double sent_heldout_frac = 0.1;
    double label_threshold = 0.5;

    // evaluation
    long human_eval_n = 50;
    long threads = 1;

    // pipeline paths
    std::string out_dir = "out";
    std::string train_data;  // optional explicit data paths for `train`/`evaluate`
    std::string test_data;

    // phase seed streams, derived from the master seed
    std::uint64_t synth_seed() const { return seed; }
    std::uint64_t split_seed() const { return seed + 101; }
    std::uint64_t classifier_seed() const { return seed + 202; }
    std::uint64_t predictor_seed() const { return seed + 303; }
    std::uint64_t policy_seed() const { return seed + 404; }
    std::uint64_t multiseq_seed() const { return seed + 505; }
    std::uint64_t rl_current_seed() const { return seed + 606; }
    std::uint64_t rl_lookahead_seed() const { return seed + 707; }
    std::uint64_t human_eval_seed() const { return seed + 808; }

    void validate() const {
        if (n_dialogues < 1) throw UsageError("n_dialogues must be >= 1");
        if (n_emotions < 1 || n_emotions > 4) throw UsageError("n_emotions must be in [1, 4]");
        if (empathetic_prob < 0.0 || empathetic_prob > 1.0) {
            throw UsageError("empathetic_prob must be in [0, 1]");
        }
        if (train_frac <= 0.0 || dev_frac < 0.0 || train_frac + dev_frac >= 1.0) {
            throw UsageError("train_frac/dev_frac must leave a nonempty test split");
        }
        if (max_vocab < 4) throw UsageError("max_vocab must be at least 4");
        if (embed_dim < 1) throw UsageError("embed_dim must be positive");
        if (temperature <= 0.0) throw UsageError("temperature must be > 0");
        if (max_context_len < 1 || max_target_len < 2 || max_decode_len < 1) {
            throw UsageError("sequence length limits are too small");
        }
        if (lambda < 0.0 || lambda > 1.0) throw UsageError("lambda must be in [0, 1]");
        if (batch_size < 1) throw UsageError("batch_size must be >= 1");
        if (policy_epochs < 1 || rl_epochs < 0 || sent_epochs < 1) {
            throw UsageError("epoch counts out of range");
        }
        if (sent_heldout_frac <= 0.0 || sent_heldout_frac >= 1.0) {
            throw UsageError("sent_heldout_frac must be in (0, 1)");
        }
        if (label_threshold < 0.0 || label_threshold > 1.0) {
            throw UsageError("label_threshold must be in [0, 1]");
        }
        if (human_eval_n < 1) throw UsageError("human_eval_n must be >= 1");
        if (threads < 1) throw UsageError("threads must be >= 1");
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["seed"] = seed;
        j["n_dialogues"] = n_dialogues;
        j["n_emotions"] = n_emotions;
        j["empathetic_prob"] = empathetic_prob;
        j["train_frac"] = train_frac;
        j["dev_frac"] = dev_frac;
        j["min_freq"] = min_freq;
        j["max_vocab"] = max_vocab;
        j["embed_dim"] = embed_dim;
        j["temperature"] = temperature;
        j["max_context_len"] = max_context_len;
        j["max_target_len"] = max_target_len;
        j["max_decode_len"] = max_decode_len;
        j["embedding_file"] = embedding_file;
        j["learning_rate"] = learning_rate;
        j["rl_learning_rate"] = rl_learning_rate;
        j["lambda"] = lambda;
        j["batch_size"] = batch_size;
        j["policy_epochs"] = policy_epochs;
        j["rl_epochs"] = rl_epochs;
        j["checkpoint_every"] = checkpoint_every;
        j["train_multiseq"] = train_multiseq;
        j["sent_embed_dim"] = sent_embed_dim;
        j["sent_hidden_dim"] = sent_hidden_dim;
        j["sent_learning_rate"] = sent_learning_rate;
        j["sent_epochs"] = sent_epochs;
        j["sent_heldout_frac"] = sent_heldout_frac;
        j["label_threshold"] = label_threshold;
        j["human_eval_n"] = human_eval_n;
        j["threads"] = threads;
        j["out_dir"] = out_dir;
        j["train_data"] = train_data;
        j["test_data"] = test_data;
        return j;
    }

    void apply(const nlohmann::json& j) {
        for (const auto& [key, value] : j.items()) {
            apply_key(key, value);
        }
    }

    void apply_key(const std::string& key, const nlohmann::json& value) {
        try {
            if (key == "seed") seed = value.get<std::uint64_t>();
            else if (key == "n_dialogues") n_dialogues = value.get<long>();
            else if (key == "n_emotions") n_emotions = value.get<long>();
            else if (key == "empathetic_prob") empathetic_prob = value.get<double>();
            else if (key == "train_frac") train_frac = value.get<double>();
            else if (key == "dev_frac") dev_frac = value.get<double>();
            else if (key == "min_freq") min_freq = value.get<long>();
            else if (key == "max_vocab") max_vocab = value.get<long>();
            else if (key == "embed_dim") embed_dim = value.get<long>();
            else if (key == "temperature") temperature = value.get<double>();
            else if (key == "max_context_len") max_context_len = value.get<long>();
            else if (key == "max_target_len") max_target_len = value.get<long>();
            else if (key == "max_decode_len") max_decode_len = value.get<long>();
            else if (key == "embedding_file") embedding_file = value.get<std::string>();
            else if (key == "learning_rate") learning_rate = value.get<double>();
            else if (key == "rl_learning_rate") rl_learning_rate = value.get<double>();
            else if (key == "lambda") lambda = value.get<double>();
            else if (key == "batch_size") batch_size = value.get<long>();
            else if (key == "policy_epochs") policy_epochs = value.get<long>();
            else if (key == "rl_epochs") rl_epochs = value.get<long>();
            else if (key == "checkpoint_every") checkpoint_every = value.get<long>();
            else if (key == "train_multiseq") train_multiseq = value.get<bool>();
            else if (key == "sent_embed_dim") sent_embed_dim = value.get<long>();
            else if (key == "sent_hidden_dim") sent_hidden_dim = value.get<long>();
            else if (key == "sent_learning_rate") sent_learning_rate = value.get<double>();
            else if (key == "sent_epochs") sent_epochs = value.get<long>();
            else if (key == "sent_heldout_frac") sent_heldout_frac = value.get<double>();
            else if (key == "label_threshold") label_threshold = value.get<double>();
            else if (key == "human_eval_n") human_eval_n = value.get<long>();
            else if (key == "threads") threads = value.get<long>();
            else if (key == "out_dir") out_dir = value.get<std::string>();
            else if (key == "train_data") train_data = value.get<std::string>();
            else if (key == "test_data") test_data = value.get<std::string>();
            else throw UsageError("unknown config key: '" + key + "'");
        } catch (const nlohmann::json::exception& e) {
            throw UsageError("config key '" + key + "' has the wrong type: " + e.what());
        }
    }

    // "--key value" override with a string value, parsed by the key's type.
    void apply_override(const std::string& key, const std::string& value) {
        nlohmann::json current = to_json();
        if (!current.contains(key)) throw UsageError("unknown config key: '" + key + "'");
        nlohmann::json parsed;
        if (current[key].is_string()) {
            parsed = value;
        } else {
            try {
                parsed = nlohmann::json::parse(value);
            } catch (const nlohmann::json::exception&) {
                throw UsageError("cannot parse value '" + value + "' for config key '" + key +
                                 "'");
            }
        }
        apply_key(key, parsed);
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw UsageError("cannot open config file: " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw UsageError("malformed config file " + path + ": " + e.what());
        }
        if (!j.is_object()) throw UsageError("config file must hold a JSON object: " + path);
        Config c;
        c.apply(j);
        return c;
    }

    void write_effective(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot write effective config: " + path);
        out << to_json().dump(2) << '\n';
    }

    // every config key, for registering CLI override flags
    static std::vector<std::string> keys() {
        std::vector<std::string> out;
        for (const auto& [key, value] : Config().to_json().items()) out.push_back(key);
        return out;
    }
};

}  // namespace lookahead
