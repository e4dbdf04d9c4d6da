#include <doctest.h>

#include "lookahead/common.hpp"
#include "lookahead/dialogue.hpp"
#include "lookahead/vocabulary.hpp"

using namespace lookahead;

namespace {

Dialogue single_user_turn(const std::string& text, int i = 0) {
    Dialogue d;
    d.dialogue_id = "d" + std::to_string(i);
    d.turns.push_back({Speaker::kUser, text});
    return d;
}

}  // namespace

TEST_CASE("build_vocabulary orders specials then frequency desc, lexicographic") {
    const std::vector<Dialogue> corpus = {single_user_turn("a b", 0), single_user_turn("a", 1)};
    Vocabulary v = build_vocabulary(corpus, 1, 10);
    CHECK(v.size() == 6);
    CHECK(v.id_of("<pad>") == 0);
    CHECK(v.id_of("<unk>") == 1);
    CHECK(v.id_of("<sos>") == 2);
    CHECK(v.id_of("<eos>") == 3);
    CHECK(v.id_of("a") == 4);
    CHECK(v.id_of("b") == 5);
}

TEST_CASE("build_vocabulary honors min_freq") {
    const std::vector<Dialogue> corpus = {single_user_turn("a b", 0), single_user_turn("a", 1)};
    Vocabulary v = build_vocabulary(corpus, 2, 10);
    CHECK(v.size() == 5);
    CHECK(v.contains("a"));
    CHECK_FALSE(v.contains("b"));
}

TEST_CASE("build_vocabulary truncates to max_size") {
    std::vector<Dialogue> corpus;
    std::string text;
    for (int i = 0; i < 1000; ++i) text += "tok" + std::to_string(i) + " ";
    corpus.push_back(single_user_turn(text));
    Vocabulary v = build_vocabulary(corpus, 1, 50);
    CHECK(v.size() == 50);
}

TEST_CASE("build_vocabulary rejects max_size below the special count") {
    const std::vector<Dialogue> corpus = {single_user_turn("a")};
    CHECK_THROWS_AS(build_vocabulary(corpus, 1, 3), UsageError);
}

TEST_CASE("encode/decode round-trips in-vocabulary tokens, OOV maps to UNK") {
    const std::vector<Dialogue> corpus = {single_user_turn("red green blue red green red")};
    Vocabulary v = build_vocabulary(corpus, 1, 100);
    Rng rng(311);
    const std::vector<std::string> pool = {"red", "green", "blue"};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> toks;
        for (std::size_t i = 0; i < 1 + rng.index(12); ++i) {
            toks.push_back(pool[rng.index(pool.size())]);
        }
        CHECK(v.decode(v.encode(toks)) == toks);
    }
    CHECK(v.id_of("oov-token") == Vocabulary::kUnkId);
    CHECK(v.decode({v.id_of("oov-token")}) == std::vector<std::string>{"<unk>"});
}

TEST_CASE("vocabulary hash changes with content") {
    Vocabulary a({"x", "y"});
    Vocabulary b({"x", "z"});
    CHECK(a.hash() != b.hash());
    CHECK(a.hash() == Vocabulary({"x", "y"}).hash());
}
