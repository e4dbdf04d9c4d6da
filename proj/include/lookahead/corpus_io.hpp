#pragma once

// JSONL corpus files, one dialogue per line:
//   {"dialogue_id": str, "emotion": str|null, "turns":
//     [{"speaker": "user"|"system", "text": str}]}
// UTF-8, '\n' record separator. Loading validates the alternation invariant
// and reports the offending line number.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lookahead/common.hpp"
#include "lookahead/dialogue.hpp"

namespace lookahead {

inline nlohmann::json dialogue_to_json(const Dialogue& d) {
    nlohmann::json turns = nlohmann::json::array();
    for (const auto& t : d.turns) {
        turns.push_back({{"speaker", speaker_name(t.speaker)}, {"text", t.text}});
    }
    nlohmann::json j;
    j["dialogue_id"] = d.dialogue_id;
    j["emotion"] = d.emotion ? nlohmann::json(*d.emotion) : nlohmann::json(nullptr);
    j["turns"] = std::move(turns);
    return j;
}

inline Dialogue dialogue_from_json(const nlohmann::json& j) {
    Dialogue d;
    d.dialogue_id = j.at("dialogue_id").get<std::string>();
    if (j.contains("emotion") && !j.at("emotion").is_null()) {
        d.emotion = j.at("emotion").get<std::string>();
    }
    for (const auto& tj : j.at("turns")) {
        const std::string speaker = tj.at("speaker").get<std::string>();
        Turn turn;
        if (speaker == "user") {
            turn.speaker = Speaker::kUser;
        } else if (speaker == "system") {
            turn.speaker = Speaker::kSystem;
        } else {
            throw DataError("unknown speaker '" + speaker + "'");
        }
        turn.text = tj.at("text").get<std::string>();
        d.turns.push_back(std::move(turn));
    }
    return d;
}

inline std::vector<Dialogue> load_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus file: " + path);
    std::vector<Dialogue> corpus;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Dialogue d;
        try {
            d = dialogue_from_json(nlohmann::json::parse(line));
        } catch (const std::exception& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": malformed record: " +
                            e.what());
        }
        if (const std::string err = validate_dialogue(d); !err.empty()) {
            throw DataError(path + ":" + std::to_string(line_no) + ": " + err);
        }
        corpus.push_back(std::move(d));
    }
    return corpus;
}

inline void save_jsonl(const std::vector<Dialogue>& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open corpus file for writing: " + path);
    for (const auto& d : corpus) {
        out << dialogue_to_json(d).dump() << '\n';
    }
    if (!out) throw DataError("error writing corpus file: " + path);
}

inline constexpr const char* kVocabFormat = "lookahead-vocab-v1";

inline void save_vocab(const Vocabulary& vocab, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open vocabulary file for writing: " + path);
    nlohmann::json j;
    j["format"] = kVocabFormat;
    j["hash"] = vocab.hash();
    j["tokens"] = vocab.all_tokens();
    out << j.dump() << '\n';
}

inline Vocabulary load_vocab(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open vocabulary file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError("malformed vocabulary file " + path + ": " + e.what());
    }
    if (!j.contains("format") || j["format"] != kVocabFormat) {
        throw DataError("not a recognized vocabulary file: " + path);
    }
    auto tokens = j.at("tokens").get<std::vector<std::string>>();
    if (tokens.size() < Vocabulary::kNumSpecials) {
        throw DataError("vocabulary file too small: " + path);
    }
    Vocabulary vocab(std::vector<std::string>(tokens.begin() + Vocabulary::kNumSpecials,
                                              tokens.end()));
    if (j.contains("hash") && vocab.hash() != j["hash"].get<std::string>()) {
        throw DataError("vocabulary hash mismatch: " + path);
    }
    return vocab;
}

}  // namespace lookahead
