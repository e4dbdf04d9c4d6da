#pragma once

// Dialogue types and context flattening. A dialogue is an alternating
// user/system turn sequence starting with a user turn. Flattening yields one
// training example per system turn: the example's context is the previous
// system turn and the latest user turn joined by <sep> (just the opening
// user turn for the first system turn), its target is the system turn, and
// it remembers the next user turn when one exists.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lookahead/common.hpp"
#include "lookahead/tokenizer.hpp"
#include "lookahead/vocabulary.hpp"

namespace lookahead {

enum class Speaker { kUser, kSystem };

inline const char* speaker_name(Speaker s) { return s == Speaker::kUser ? "user" : "system"; }

struct Turn {
    Speaker speaker;
    std::string text;
};

struct Dialogue {
    std::string dialogue_id;
    std::vector<Turn> turns;
    std::optional<std::string> emotion;

    int user_turn_count() const {
        int n = 0;
        for (const auto& t : turns) n += (t.speaker == Speaker::kUser);
        return n;
    }

    int system_turn_count() const {
        int n = 0;
        for (const auto& t : turns) n += (t.speaker == Speaker::kSystem);
        return n;
    }
};

// Checks alternation (starting with USER) and that every turn tokenizes to a
// non-empty sequence. Returns an error message, or empty if valid.
inline std::string validate_dialogue(const Dialogue& d) {
    if (d.turns.empty()) return "dialogue '" + d.dialogue_id + "' has no turns";
    for (std::size_t i = 0; i < d.turns.size(); ++i) {
        const Speaker expect = (i % 2 == 0) ? Speaker::kUser : Speaker::kSystem;
        if (d.turns[i].speaker != expect) {
            return "dialogue '" + d.dialogue_id + "' turn " + std::to_string(i) +
                   " breaks user/system alternation";
        }
        if (tokenize(d.turns[i].text).empty()) {
            return "dialogue '" + d.dialogue_id + "' turn " + std::to_string(i) +
                   " is empty after tokenization";
        }
    }
    return "";
}

struct TrainingExample {
    std::vector<int> context_tokens;    // x = [w_1 .. w_M], left-truncated
    std::vector<int> target_tokens;     // y*, EOS-terminated, right-truncated
    std::vector<int> next_user_tokens;  // empty when absent
    bool has_next_user = false;
    std::optional<std::string> emotion;

    // Surface forms kept for reward scoring and sample export; the sentiment
    // models re-tokenize against their own vocabularies.
    std::string context_text;
    std::string user_text;  // most recent user turn
    std::string target_text;
};

struct FlattenOptions {
    int max_context_len = 40;
    int max_target_len = 20;
};

inline std::vector<TrainingExample> flatten_contexts(const Dialogue& dialogue,
                                                     const Vocabulary& vocab,
                                                     const FlattenOptions& opts = {}) {
    if (const std::string err = validate_dialogue(dialogue); !err.empty()) {
        throw DataError(err);
    }
    std::vector<TrainingExample> out;
    for (std::size_t i = 1; i < dialogue.turns.size(); i += 2) {
        const Turn& target = dialogue.turns[i];  // system turn
        TrainingExample ex;
        ex.emotion = dialogue.emotion;

        const Turn& user = dialogue.turns[i - 1];
        ex.user_text = user.text;
        std::vector<std::string> context_toks;
        if (i >= 2) {
            const Turn& prev_system = dialogue.turns[i - 2];
            context_toks = tokenize(prev_system.text);
            context_toks.push_back(tokens::kSep);
            ex.context_text = prev_system.text + " " + tokens::kSep + " " + user.text;
        } else {
            ex.context_text = user.text;
        }
        for (auto& t : tokenize(user.text)) context_toks.push_back(std::move(t));

        ex.context_tokens = vocab.encode(context_toks);
        if (static_cast<int>(ex.context_tokens.size()) > opts.max_context_len) {
            // keep the most recent tokens
            ex.context_tokens.erase(
                ex.context_tokens.begin(),
                ex.context_tokens.end() - opts.max_context_len);
        }

        ex.target_text = target.text;
        ex.target_tokens = vocab.encode(tokenize(target.text));
        if (static_cast<int>(ex.target_tokens.size()) > opts.max_target_len - 1) {
            ex.target_tokens.resize(static_cast<std::size_t>(opts.max_target_len - 1));
        }
        ex.target_tokens.push_back(Vocabulary::kEosId);

        if (i + 1 < dialogue.turns.size()) {
            ex.has_next_user = true;
            ex.next_user_tokens = vocab.encode(tokenize(dialogue.turns[i + 1].text));
        }
        out.push_back(std::move(ex));
    }
    return out;
}

inline std::vector<TrainingExample> flatten_corpus(const std::vector<Dialogue>& corpus,
                                                   const Vocabulary& vocab,
                                                   const FlattenOptions& opts = {}) {
    std::vector<TrainingExample> out;
    for (const auto& d : corpus) {
        auto exs = flatten_contexts(d, vocab, opts);
        out.insert(out.end(), std::make_move_iterator(exs.begin()),
                   std::make_move_iterator(exs.end()));
    }
    return out;
}

// Token frequencies over every turn, plus one <sep> per flattened context
// that joins two turns, so the separator competes for a vocabulary slot
// exactly as often as it appears in training inputs.
inline std::map<std::string, long> count_corpus_tokens(const std::vector<Dialogue>& corpus) {
    std::map<std::string, long> counts;
    for (const auto& d : corpus) {
        for (const auto& turn : d.turns) {
            for (const auto& tok : tokenize(turn.text)) ++counts[tok];
        }
        const long joins = d.system_turn_count() - 1;
        if (joins > 0) counts[tokens::kSep] += joins;
    }
    return counts;
}

inline Vocabulary build_vocabulary(const std::vector<Dialogue>& corpus, long min_freq,
                                   std::size_t max_size) {
    if (corpus.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
    return Vocabulary::build(count_corpus_tokens(corpus), min_freq, max_size);
}

}  // namespace lookahead
