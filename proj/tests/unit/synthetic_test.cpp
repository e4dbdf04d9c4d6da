#include <doctest.h>

#include <set>

#include "lookahead/corpus_io.hpp"
#include "lookahead/synthetic.hpp"

using namespace lookahead;

TEST_CASE("synthetic corpus is deterministic given the seed") {
    const auto a = generate_synthetic_corpus(7, 60);
    const auto b = generate_synthetic_corpus(7, 60);
    REQUIRE(a.size() == b.size());
    std::string bytes_a, bytes_b;
    for (const auto& d : a) bytes_a += dialogue_to_json(d).dump() + "\n";
    for (const auto& d : b) bytes_b += dialogue_to_json(d).dump() + "\n";
    CHECK(bytes_a == bytes_b);
    CHECK(bytes_a != "");

    const auto c = generate_synthetic_corpus(8, 60);
    std::string bytes_c;
    for (const auto& d : c) bytes_c += dialogue_to_json(d).dump() + "\n";
    CHECK(bytes_a != bytes_c);
}

TEST_CASE("synthetic corpus has the requested size and valid dialogues") {
    const auto corpus = generate_synthetic_corpus(7, 500);
    CHECK(corpus.size() == 500);
    std::set<std::string> emotions;
    for (const auto& d : corpus) {
        CHECK(validate_dialogue(d) == "");
        CHECK(d.turns.size() >= 4);
        CHECK(d.turns.size() <= 6);
        REQUIRE(d.emotion.has_value());
        emotions.insert(*d.emotion);
    }
    CHECK(emotions.size() == 4);  // default K
}

TEST_CASE("marker rule holds for every generated reply/reaction pair") {
    const auto corpus = generate_synthetic_corpus(21, 300);
    long pairs = 0;
    for (const auto& d : corpus) {
        for (std::size_t i = 1; i + 1 < d.turns.size(); i += 2) {
            const std::string& reply = d.turns[i].text;       // s_{i+1}
            const std::string& reaction = d.turns[i + 1].text;  // u_{i+2}
            const bool empathetic = synth::contains_empathy_marker(reply);
            const bool dismissive = synth::contains_dismissive_marker(reply);
            CHECK(empathetic != dismissive);  // every reply carries exactly one family
            const auto sentiment = synth::reaction_sentiment(reaction);
            REQUIRE(sentiment.has_value());
            CHECK(*sentiment == (empathetic ? 1 : 0));
            ++pairs;
        }
    }
    CHECK(pairs > 300);  // most dialogues contribute at least one pair
}

TEST_CASE("marker and sentinel vocabularies do not collide") {
    auto toks = [](const std::vector<std::string>& texts) {
        std::set<std::string> out;
        for (const auto& t : texts)
            for (const auto& tok : tokenize(t)) out.insert(tok);
        return out;
    };
    const auto empathy = toks(synth::empathy_markers());
    const auto dismissive = toks(synth::dismissive_markers());
    const auto positive = toks(synth::positive_sentinels());
    const auto negative = toks(synth::negative_sentinels());

    auto disjoint = [](const std::set<std::string>& a, const std::set<std::string>& b) {
        for (const auto& x : a)
            if (b.count(x)) return false;
        return true;
    };
    CHECK(disjoint(empathy, dismissive));
    CHECK(disjoint(positive, negative));
    CHECK(disjoint(empathy, positive));
    CHECK(disjoint(empathy, negative));
    CHECK(disjoint(dismissive, positive));
    CHECK(disjoint(dismissive, negative));

    // reactions never contain system markers; openers contain neither
    const auto reaction_toks = [&] {
        auto s = toks(synth::positive_reactions());
        auto n = toks(synth::negative_reactions());
        s.insert(n.begin(), n.end());
        return s;
    }();
    CHECK(disjoint(reaction_toks, empathy));
    CHECK(disjoint(reaction_toks, dismissive));
    for (const auto& bank : synth::openers()) {
        const auto opener_toks = toks(bank);
        CHECK(disjoint(opener_toks, empathy));
        CHECK(disjoint(opener_toks, dismissive));
        CHECK(disjoint(opener_toks, positive));
        CHECK(disjoint(opener_toks, negative));
    }
}

TEST_CASE("labeled utterance extraction matches reaction count") {
    const auto corpus = generate_synthetic_corpus(3, 100);
    const auto labeled = extract_labeled_utterances(corpus);
    long reactions = 0;
    for (const auto& d : corpus) reactions += d.user_turn_count() - 1;
    CHECK(static_cast<long>(labeled.size()) == reactions);
    for (const auto& [text, label] : labeled) {
        CHECK((label == 0 || label == 1));
        CHECK(synth::reaction_sentiment(text) == label);
    }
}

TEST_CASE("synthetic generator validates its arguments") {
    CHECK_THROWS_AS(generate_synthetic_corpus(1, 0), UsageError);
    SynthConfig cfg;
    cfg.n_emotions = 9;
    CHECK_THROWS_AS(generate_synthetic_corpus(1, 5, cfg), UsageError);
}
