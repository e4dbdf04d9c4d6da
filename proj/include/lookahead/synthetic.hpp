#pragma once

// Synthetic desk-scale dialogue corpus.
//
// Every dialogue opens with a user turn drawn from one of four emotion
// families (sad, scared, angry, happy). Each system turn is drawn from
// either the empathetic or the dismissive reply bank; the user's following
// turn is then positive or negative as a deterministic function of that
// choice: an empathy marker in s_{i+1} yields a positive u_{i+2}, a
// dismissive marker a negative one. Reply choice is independent of the
// context, so a likelihood-trained generator cannot predict it and settles
// on the majority family.
//
// Marker words appear only in system turns; reaction sentinels appear only
// in user reactions. The two vocabularies are disjoint, which keeps the
// look-ahead signal (markers in the system turn) separate from the signal a
// response-sentiment classifier learns (sentinels in user turns).

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "lookahead/common.hpp"
#include "lookahead/dialogue.hpp"
#include "lookahead/tokenizer.hpp"

namespace lookahead {

struct SynthConfig {
    int n_emotions = 4;  // 1..4 topic/emotion families
    // Base chance that a gold system turn is empathetic. The effective
    // chance varies by topic and by turn position (see topic_offset), so
    // contexts spread into bands around the base instead of one knife-edge
    // family prior.
    double empathetic_prob = 0.52;
    double second_reply_delta = -0.04;  // later system turns lean dismissive
};

namespace synth {

inline const std::vector<std::string>& empathy_markers() {
    static const std::vector<std::string> words = {"sorry", "wow",   "glad", "understand",
                                                   "hope",  "tough", "hear", "comfort"};
    return words;
}

inline const std::vector<std::string>& dismissive_markers() {
    static const std::vector<std::string> words = {"whatever", "meh",  "boring",   "overreacting",
                                                   "shrug",    "dull", "nonsense", "bother"};
    return words;
}

inline const std::vector<std::string>& positive_sentinels() {
    static const std::vector<std::string> words = {"thanks", "thank", "better",   "helps",
                                                   "appreciate", "kind", "true", "relieved"};
    return words;
}

inline const std::vector<std::string>& negative_sentinels() {
    static const std::vector<std::string> words = {"worse",  "useless", "awful", "unheard",
                                                   "hurts",  "forget",  "alone", "cold"};
    return words;
}

inline const std::vector<std::string>& emotion_families() {
    static const std::vector<std::string> names = {"sad", "scared", "angry", "happy"};
    return names;
}

// Gold replies to sad stories are empathetic a little more often, replies to
// happy ones a little less; added to SynthConfig::empathetic_prob.
inline double topic_offset(std::size_t family) {
    static const double offsets[] = {0.03, 0.0, -0.04, -0.08};
    return offsets[family];
}

inline const std::vector<std::vector<std::string>>& openers() {
    static const std::vector<std::vector<std::string>> banks = {
        {
            "i lost my job last week and it still stings .",
            "my dog passed away yesterday .",
            "i failed the exam i studied months for .",
            "my best friend moved far away this spring .",
        },
        {
            "i froze at the top of the roller coaster today .",
            "the thunder last night kept me shaking .",
            "i have a surgery scheduled and i keep worrying .",
            "a dog chased me on my run this morning .",
        },
        {
            "my landlord keeps ignoring my calls about the leak .",
            "a driver cut me off and nearly clipped my bike .",
            "my coworker took credit for my report again .",
            "the airline canceled my flight with no warning .",
        },
        {
            "i finally got the promotion at work .",
            "my sister is getting married this summer .",
            "my team won the league final yesterday .",
            "i adopted a tiny kitten over the weekend .",
        },
    };
    return banks;
}

// Every empathetic reply starts with "i" and every dismissive reply with
// "well", so the reply family is decided at the first decoding step and the
// two banks share no interior scaffold a sampled trajectory could pivot
// through mid-sequence. Greedy decoding then tracks whichever family holds
// the majority of the policy's probability mass. Acknowledging pain also
// means using pain words ("hurts", "alone"), so a response-sentiment
// classifier reads most of this family as negative even though the user's
// next turn comes back positive.
inline const std::vector<std::string>& empathetic_replies() {
    static const std::vector<std::string> bank = {
        "i am so sorry , i know this hurts .",
        "i understand , i know this hurts .",
        "i hear you , you are not alone in this .",
        "i am so sorry , you are not alone in this .",
        "i understand , this hurts and i am here .",
        "i am glad you shared , i know this hurts .",
        "i know this is tough , you are not alone .",
        "i hope it gets easier , you are not alone .",
    };
    return bank;
}

// The dismissive family is the corpus majority, so a likelihood-trained
// decoder greedily rolls out a dismissive response; that is the behavior
// the RL phase has to move away from. Several of these replies deflect
// cheerfully (they carry the positive sentinel words a response-sentiment
// classifier keys on), so maximizing the response's own sentiment points
// into this family, not the empathetic one.
inline const std::vector<std::string>& dismissive_replies() {
    static const std::vector<std::string> bank = {
        "well , thanks for sharing , but whatever .",
        "well , that sounds a bit boring to me .",
        "well , stop overreacting , it is a small thing .",
        "well , that sounds dull , but it helps to smile .",
        "well , meh , better to laugh it off .",
        "well , that is nonsense to worry about .",
        "well , whatever , surely that is all fine .",
        "well , meh , thank you for the story though .",
    };
    return bank;
}

inline const std::vector<std::string>& positive_reactions() {
    static const std::vector<std::string> bank = {
        "thanks , i feel a bit better now .",
        "thank you , that really helps .",
        "i appreciate you saying that .",
        "that is kind of you , i feel lighter .",
        "you are right , i feel relieved .",
        "thanks for listening , it means a lot .",
        "that is true , i needed those words .",
        "so kind of you , i can manage now .",
    };
    return bank;
}

inline const std::vector<std::string>& negative_reactions() {
    static const std::vector<std::string> bank = {
        "that makes it all feel worse .",
        "now i feel worse than before .",
        "you are not even listening , this is useless .",
        "that was an awful thing to say .",
        "i feel completely unheard .",
        "that hurts more than anything .",
        "forget it , i will keep it to myself .",
        "so cold of you , i feel alone with this .",
    };
    return bank;
}

inline bool contains_any(const std::string& text, const std::vector<std::string>& words) {
    static thread_local std::unordered_set<std::string> set;
    set.clear();
    set.insert(words.begin(), words.end());
    for (const auto& tok : tokenize(text)) {
        if (set.count(tok)) return true;
    }
    return false;
}

inline bool contains_empathy_marker(const std::string& text) {
    return contains_any(text, empathy_markers());
}

inline bool contains_dismissive_marker(const std::string& text) {
    return contains_any(text, dismissive_markers());
}

// Ground-truth sentiment of a generated user reaction, recovered from its
// sentinel words. nullopt for turns that are not reactions (e.g. openers).
inline std::optional<int> reaction_sentiment(const std::string& text) {
    const bool pos = contains_any(text, positive_sentinels());
    const bool neg = contains_any(text, negative_sentinels());
    if (pos == neg) return std::nullopt;
    return pos ? 1 : 0;
}

}  // namespace synth

inline std::vector<Dialogue> generate_synthetic_corpus(std::uint64_t seed, int n_dialogues,
                                                       const SynthConfig& config = {}) {
    if (n_dialogues < 1) throw UsageError("n_dialogues must be >= 1");
    if (config.n_emotions < 1 ||
        config.n_emotions > static_cast<int>(synth::emotion_families().size())) {
        throw UsageError("n_emotions must be in [1, " +
                         std::to_string(synth::emotion_families().size()) + "]");
    }
    Rng rng(seed);
    std::vector<Dialogue> corpus;
    corpus.reserve(static_cast<std::size_t>(n_dialogues));
    for (int i = 0; i < n_dialogues; ++i) {
        const std::size_t family = rng.index(static_cast<std::size_t>(config.n_emotions));
        const int n_turns = 4 + static_cast<int>(rng.below(3));  // 4..6

        Dialogue d;
        d.dialogue_id = "synth-" + std::to_string(i);
        d.emotion = synth::emotion_families()[family];

        const auto& opener_bank = synth::openers()[family];
        d.turns.push_back({Speaker::kUser, opener_bank[rng.index(opener_bank.size())]});
        bool last_reply_empathetic = false;
        int system_turns = 0;
        while (static_cast<int>(d.turns.size()) < n_turns) {
            if (d.turns.back().speaker == Speaker::kUser) {
                double p = config.empathetic_prob + synth::topic_offset(family);
                if (system_turns >= 1) p += config.second_reply_delta;
                p = std::min(1.0, std::max(0.0, p));
                last_reply_empathetic = rng.uniform01() < p;
                const auto& bank = last_reply_empathetic ? synth::empathetic_replies()
                                                         : synth::dismissive_replies();
                d.turns.push_back({Speaker::kSystem, bank[rng.index(bank.size())]});
                ++system_turns;
            } else {
                const auto& bank = last_reply_empathetic ? synth::positive_reactions()
                                                         : synth::negative_reactions();
                d.turns.push_back({Speaker::kUser, bank[rng.index(bank.size())]});
            }
        }
        corpus.push_back(std::move(d));
    }
    return corpus;
}

// Labeled single utterances for classifier training: every generated user
// reaction paired with its by-construction sentiment.
inline std::vector<std::pair<std::string, int>> extract_labeled_utterances(
    const std::vector<Dialogue>& corpus) {
    std::vector<std::pair<std::string, int>> out;
    for (const auto& d : corpus) {
        for (std::size_t i = 2; i < d.turns.size(); i += 2) {
            const auto label = synth::reaction_sentiment(d.turns[i].text);
            if (label) out.emplace_back(d.turns[i].text, *label);
        }
    }
    return out;
}

}  // namespace lookahead
