#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "lookahead/common.hpp"
#include "lookahead/corpus_io.hpp"
#include "lookahead/dialogue.hpp"
#include "lookahead/synthetic.hpp"

using namespace lookahead;

namespace {

Dialogue make_dialogue(const std::vector<std::string>& texts, const char* id = "d0") {
    Dialogue d;
    d.dialogue_id = id;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        d.turns.push_back({i % 2 == 0 ? Speaker::kUser : Speaker::kSystem, texts[i]});
    }
    return d;
}

Vocabulary vocab_for(const std::vector<Dialogue>& corpus) {
    return build_vocabulary(corpus, 1, 1000);
}

std::string temp_path(const char* name) {
    return std::string("flatten_io_") + name + ".tmp.jsonl";
}

}  // namespace

TEST_CASE("flatten_contexts unrolls one example per system turn") {
    const Dialogue d = make_dialogue({"u one", "s one", "u two", "s two", "u three"});
    const Vocabulary v = vocab_for({d});
    const auto examples = flatten_contexts(d, v);
    REQUIRE(examples.size() == 2);

    CHECK(examples[0].context_tokens == v.encode({"u", "one"}));
    CHECK(examples[0].target_tokens == v.encode({"s", "one", "<eos>"}));
    CHECK(examples[0].has_next_user);
    CHECK(examples[0].next_user_tokens == v.encode({"u", "two"}));
    CHECK(examples[0].user_text == "u one");

    CHECK(examples[1].context_tokens == v.encode({"s", "one", "<sep>", "u", "two"}));
    CHECK(examples[1].target_tokens == v.encode({"s", "two", "<eos>"}));
    CHECK(examples[1].has_next_user);
    CHECK(examples[1].next_user_tokens == v.encode({"u", "three"}));
    CHECK(examples[1].user_text == "u two");
}

TEST_CASE("flatten_contexts of a single exchange has no next user turn") {
    const Dialogue d = make_dialogue({"hello there", "hi friend"});
    const Vocabulary v = vocab_for({d});
    const auto examples = flatten_contexts(d, v);
    REQUIRE(examples.size() == 1);
    CHECK(examples[0].context_tokens == v.encode({"hello", "there"}));
    CHECK_FALSE(examples[0].has_next_user);
}

TEST_CASE("flatten_contexts of a user-only dialogue is empty") {
    const Dialogue d = make_dialogue({"just me"});
    const Vocabulary v = vocab_for({d});
    CHECK(flatten_contexts(d, v).empty());
}

TEST_CASE("flatten_contexts yields exactly the system turn count, as a property") {
    Rng rng(77);
    const auto corpus = generate_synthetic_corpus(99, 40);
    const Vocabulary v = vocab_for(corpus);
    for (const auto& d : corpus) {
        CHECK(flatten_contexts(d, v).size() ==
              static_cast<std::size_t>(d.system_turn_count()));
    }
}

TEST_CASE("flatten truncates context from the left and target from the right") {
    std::string long_user, long_system;
    for (int i = 0; i < 60; ++i) long_user += "u" + std::to_string(i) + " ";
    for (int i = 0; i < 60; ++i) long_system += "s" + std::to_string(i) + " ";
    const Dialogue d = make_dialogue({long_user, long_system});
    const Vocabulary v = vocab_for({d});
    FlattenOptions opts;
    opts.max_context_len = 10;
    opts.max_target_len = 5;
    const auto examples = flatten_contexts(d, v, opts);
    REQUIRE(examples.size() == 1);
    CHECK(examples[0].context_tokens.size() == 10);
    // most recent tokens kept
    CHECK(examples[0].context_tokens.back() == v.id_of("u59"));
    CHECK(examples[0].context_tokens.front() == v.id_of("u50"));
    REQUIRE(examples[0].target_tokens.size() == 5);
    CHECK(examples[0].target_tokens.front() == v.id_of("s0"));
    CHECK(examples[0].target_tokens.back() == Vocabulary::kEosId);
}

TEST_CASE("flatten rejects dialogues that break alternation") {
    Dialogue d;
    d.dialogue_id = "bad";
    d.turns.push_back({Speaker::kSystem, "i speak first"});
    const Vocabulary v;
    CHECK_THROWS_AS(flatten_contexts(d, v), DataError);
}

TEST_CASE("jsonl save/load round-trips a synthetic corpus") {
    const auto corpus = generate_synthetic_corpus(5, 25);
    const std::string path = temp_path("roundtrip");
    save_jsonl(corpus, path);
    const auto loaded = load_jsonl(path);
    REQUIRE(loaded.size() == corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        CHECK(loaded[i].dialogue_id == corpus[i].dialogue_id);
        CHECK(loaded[i].emotion == corpus[i].emotion);
        REQUIRE(loaded[i].turns.size() == corpus[i].turns.size());
        for (std::size_t t = 0; t < corpus[i].turns.size(); ++t) {
            CHECK(loaded[i].turns[t].speaker == corpus[i].turns[t].speaker);
            CHECK(loaded[i].turns[t].text == corpus[i].turns[t].text);
        }
    }
    std::remove(path.c_str());
}

TEST_CASE("jsonl loader reports the offending line number") {
    const std::string path = temp_path("malformed");
    {
        std::ofstream out(path);
        out << R"({"dialogue_id": "ok", "emotion": null, "turns": [{"speaker": "user", "text": "hi"}]})"
            << "\n";
        out << "{not json\n";
    }
    try {
        load_jsonl(path);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("jsonl loader rejects invalid speakers and broken alternation with line numbers") {
    const std::string path = temp_path("alternation");
    {
        std::ofstream out(path);
        out << R"({"dialogue_id": "bad", "emotion": null, "turns": [{"speaker": "system", "text": "me first"}]})"
            << "\n";
    }
    try {
        load_jsonl(path);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(":1:") != std::string::npos);
        CHECK(std::string(e.what()).find("alternation") != std::string::npos);
    }
    std::remove(path.c_str());
}
