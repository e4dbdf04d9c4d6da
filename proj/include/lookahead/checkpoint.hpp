#pragma once

// Model checkpoints: a JSON container mapping parameter name -> shape ->
// row-major values, with a header carrying the model config, the model kind
// and the vocabulary (plus its hash, verified on load). Key order is
// deterministic, so identical models serialize to identical bytes.

#include <fstream>
#include <string>

#include <json.hpp>

#include "lookahead/common.hpp"
#include "lookahead/graph.hpp"
#include "lookahead/vocabulary.hpp"

namespace lookahead {

inline constexpr const char* kCheckpointFormat = "lookahead-checkpoint-v1";

struct Checkpoint {
    std::string kind;  // "policy" or "sentiment"
    nlohmann::json config;
    nlohmann::json extra;
    Vocabulary vocab;
    ParameterStore store;
};

inline nlohmann::json checkpoint_to_json(const std::string& kind, const nlohmann::json& config,
                                         const Vocabulary& vocab, const ParameterStore& store,
                                         const nlohmann::json& extra = nlohmann::json::object()) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [name, p] : store) {
        params[name] = {{"shape", p.value.shape()}, {"data", p.value.values()}};
    }
    nlohmann::json j;
    j["format"] = kCheckpointFormat;
    j["kind"] = kind;
    j["config"] = config;
    j["extra"] = extra;
    j["vocab_hash"] = vocab.hash();
    j["vocabulary"] = vocab.all_tokens();
    j["params"] = std::move(params);
    return j;
}

inline void save_checkpoint(const std::string& path, const std::string& kind,
                            const nlohmann::json& config, const Vocabulary& vocab,
                            const ParameterStore& store,
                            const nlohmann::json& extra = nlohmann::json::object()) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open checkpoint for writing: " + path);
    out << checkpoint_to_json(kind, config, vocab, store, extra).dump() << '\n';
    if (!out) throw DataError("error writing checkpoint: " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError("malformed checkpoint " + path + ": " + e.what());
    }
    if (!j.contains("format") || j["format"] != kCheckpointFormat) {
        throw DataError("not a recognized checkpoint: " + path);
    }
    Checkpoint ck;
    ck.kind = j.at("kind").get<std::string>();
    ck.config = j.at("config");
    ck.extra = j.value("extra", nlohmann::json::object());

    auto all_tokens = j.at("vocabulary").get<std::vector<std::string>>();
    if (all_tokens.size() < Vocabulary::kNumSpecials) {
        throw DataError("checkpoint vocabulary too small: " + path);
    }
    ck.vocab = Vocabulary(std::vector<std::string>(
        all_tokens.begin() + Vocabulary::kNumSpecials, all_tokens.end()));
    if (ck.vocab.hash() != j.at("vocab_hash").get<std::string>()) {
        throw DataError("checkpoint vocabulary hash mismatch: " + path);
    }

    for (const auto& [name, pj] : j.at("params").items()) {
        auto shape = pj.at("shape").get<std::vector<int>>();
        auto data = pj.at("data").get<std::vector<Real>>();
        auto& p = ck.store.create(name, shape);
        if (p.value.numel() != data.size()) {
            throw DataError("checkpoint parameter '" + name + "' has inconsistent shape: " + path);
        }
        p.value = Tensor(std::move(shape), std::move(data));
    }
    return ck;
}

}  // namespace lookahead
