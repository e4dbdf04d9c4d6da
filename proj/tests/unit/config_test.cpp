#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "lookahead/config.hpp"

using namespace lookahead;

TEST_CASE("config defaults validate and round-trip through JSON") {
    Config cfg;
    cfg.validate();
    Config copy;
    copy.apply(cfg.to_json());
    CHECK(copy.to_json() == cfg.to_json());
    CHECK(cfg.lambda == 0.25);
    CHECK(cfg.temperature == 0.4);
    CHECK(cfg.learning_rate == 1e-3);
    CHECK(cfg.batch_size == 16);
}

TEST_CASE("unknown config keys are rejected") {
    Config cfg;
    CHECK_THROWS_AS(cfg.apply_key("no_such_key", 1), UsageError);
    CHECK_THROWS_AS(cfg.apply_override("no_such_key", "1"), UsageError);
}

TEST_CASE("config file loading honors values and rejects bad types") {
    const std::string path = "config_test.tmp.json";
    {
        std::ofstream out(path);
        out << R"({"seed": 42, "lambda": 0.5, "out_dir": "elsewhere"})";
    }
    const Config cfg = Config::load(path);
    CHECK(cfg.seed == 42);
    CHECK(cfg.lambda == 0.5);
    CHECK(cfg.out_dir == "elsewhere");
    {
        std::ofstream out(path);
        out << R"({"lambda": "not a number"})";
    }
    CHECK_THROWS_AS(Config::load(path), UsageError);
    std::remove(path.c_str());
}

TEST_CASE("string overrides parse by the key's declared type") {
    Config cfg;
    cfg.apply_override("lambda", "0.75");
    CHECK(cfg.lambda == 0.75);
    cfg.apply_override("batch_size", "4");
    CHECK(cfg.batch_size == 4);
    cfg.apply_override("out_dir", "some/dir");
    CHECK(cfg.out_dir == "some/dir");
    cfg.apply_override("train_multiseq", "false");
    CHECK_FALSE(cfg.train_multiseq);
    CHECK_THROWS_AS(cfg.apply_override("lambda", "zero point five"), UsageError);
}

TEST_CASE("validation catches out-of-range values") {
    Config cfg;
    cfg.lambda = 1.5;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
    cfg = Config();
    cfg.temperature = 0.0;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
    cfg = Config();
    cfg.train_frac = 0.95;
    cfg.dev_frac = 0.1;  // no test split left
    CHECK_THROWS_AS(cfg.validate(), UsageError);
    cfg = Config();
    cfg.max_vocab = 2;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
}

TEST_CASE("phase seeds derive deterministically from the master seed") {
    Config a, b;
    a.seed = b.seed = 99;
    CHECK(a.policy_seed() == b.policy_seed());
    CHECK(a.synth_seed() != a.rl_lookahead_seed());
    // the effective config written next to artifacts is reproducible
    const std::string p1 = "eff1.tmp.json", p2 = "eff2.tmp.json";
    a.write_effective(p1);
    b.write_effective(p2);
    std::ifstream f1(p1), f2(p2);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    CHECK(!s1.empty());
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}
