#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lookahead/checkpoint.hpp"
#include "lookahead/synthetic.hpp"
#include "lookahead/trainer.hpp"

using namespace lookahead;

namespace {

std::vector<TrainingExample> toy_examples(const Vocabulary& vocab) {
    // two fixed context -> response pairs
    Dialogue d1;
    d1.dialogue_id = "a";
    d1.turns = {{Speaker::kUser, "how was the trip"}, {Speaker::kSystem, "it was great fun"}};
    Dialogue d2;
    d2.dialogue_id = "b";
    d2.turns = {{Speaker::kUser, "what did you eat"}, {Speaker::kSystem, "a warm pizza slice"}};
    auto ex = flatten_contexts(d1, vocab);
    auto ex2 = flatten_contexts(d2, vocab);
    ex.insert(ex.end(), ex2.begin(), ex2.end());
    return ex;
}

Vocabulary toy_vocab() {
    Dialogue d1;
    d1.turns = {{Speaker::kUser, "how was the trip"}, {Speaker::kSystem, "it was great fun"}};
    Dialogue d2;
    d2.turns = {{Speaker::kUser, "what did you eat"}, {Speaker::kSystem, "a warm pizza slice"}};
    d1.dialogue_id = "a";
    d2.dialogue_id = "b";
    return build_vocabulary({d1, d2}, 1, 100);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("seq2seq training memorizes a single pair within 200 steps") {
    const Vocabulary vocab = toy_vocab();
    auto examples = toy_examples(vocab);
    examples.resize(1);

    PolicyConfig cfg;
    cfg.embed_dim = 16;
    cfg.max_decode_len = 10;
    PolicyModel model(cfg, vocab, 7);

    TrainOptions opts;
    opts.variant = Variant::kSeq2Seq;
    opts.epochs = 200;  // one example per epoch = one step per epoch
    opts.batch_size = 1;
    opts.learning_rate = Real(5e-3);
    opts.seed = 5;
    const TrainRun run = train(model, examples, opts);
    CHECK(run.final_epoch().mle_loss < 0.1);

    const auto decoded = decode_greedy(model, examples[0].context_tokens);
    std::vector<int> expect = examples[0].target_tokens;
    expect.pop_back();  // drop EOS
    CHECK(decoded == expect);
}

TEST_CASE("training losses decrease and runs are reproducible byte for byte") {
    const Vocabulary vocab = toy_vocab();
    const auto examples = toy_examples(vocab);

    auto run_once = [&](const std::string& tag) {
        PolicyConfig cfg;
        cfg.embed_dim = 12;
        PolicyModel model(cfg, vocab, 11);
        TrainOptions opts;
        opts.variant = Variant::kSeq2Seq;
        opts.epochs = 30;
        opts.batch_size = 2;
        opts.seed = 13;
        opts.metrics_path = "trainer_metrics_" + tag + ".tmp.jsonl";
        const TrainRun run = train(model, examples, opts);
        const std::string ckpt = "trainer_ckpt_" + tag + ".tmp.json";
        model.save(ckpt);
        return std::make_pair(run, ckpt);
    };
    const auto [run_a, ckpt_a] = run_once("a");
    const auto [run_b, ckpt_b] = run_once("b");

    CHECK(run_a.final_epoch().mle_loss < run_a.epochs.front().mle_loss);
    CHECK(slurp(ckpt_a) == slurp(ckpt_b));
    CHECK(slurp("trainer_metrics_a.tmp.jsonl") == slurp("trainer_metrics_b.tmp.jsonl"));
    CHECK(!slurp("trainer_metrics_a.tmp.jsonl").empty());
    for (const auto& p : {ckpt_a, ckpt_b, std::string("trainer_metrics_a.tmp.jsonl"),
                          std::string("trainer_metrics_b.tmp.jsonl")}) {
        std::remove(p.c_str());
    }
}

TEST_CASE("multiseq adds the emotion loss and trains it down") {
    const auto corpus = generate_synthetic_corpus(3, 30);
    const Vocabulary vocab = build_vocabulary(corpus, 1, 500);
    const auto examples = flatten_corpus(corpus, vocab);

    PolicyConfig cfg;
    cfg.embed_dim = 16;
    cfg.n_emotions = 4;
    PolicyModel model(cfg, vocab, 17);

    TrainOptions opts;
    opts.variant = Variant::kMultiSeq;
    opts.epochs = 10;
    opts.seed = 19;
    opts.emotion_labels = synth::emotion_families();
    const TrainRun run = train(model, examples, opts);
    REQUIRE(run.final_epoch().emotion_loss.has_value());
    REQUIRE(run.epochs.front().emotion_loss.has_value());
    CHECK(*run.final_epoch().emotion_loss < *run.epochs.front().emotion_loss);
    CHECK_FALSE(run.final_epoch().rl_loss.has_value());  // RL metrics absent
}

TEST_CASE("rl training preconditions are enforced") {
    const Vocabulary vocab = toy_vocab();
    const auto examples = toy_examples(vocab);
    PolicyConfig cfg;
    cfg.embed_dim = 12;
    PolicyModel model(cfg, vocab, 23);

    TrainOptions opts;
    opts.variant = Variant::kRlLookahead;
    opts.epochs = 1;
    SUBCASE("missing pre-trained checkpoint") {
        SentimentConfig scfg;
        SentimentModel predictor(SentimentKind::kPredictor, scfg, Vocabulary({"x"}));
        opts.initialized_from_checkpoint = false;
        CHECK_THROWS_AS(train(model, examples, opts, nullptr, &predictor), PreconditionError);
    }
    SUBCASE("missing reward model") {
        opts.initialized_from_checkpoint = true;
        CHECK_THROWS_AS(train(model, examples, opts, nullptr, nullptr), PreconditionError);
        opts.variant = Variant::kRlCurrent;
        CHECK_THROWS_AS(train(model, examples, opts, nullptr, nullptr), PreconditionError);
    }
    SUBCASE("multiseq without an emotion head") {
        opts.variant = Variant::kMultiSeq;
        CHECK_THROWS_AS(train(model, examples, opts), PreconditionError);
    }
}

TEST_CASE("rl training raises the sampled reward on a marker-separable predictor") {
    // teach the policy that empathetic markers pay off
    const auto corpus = generate_synthetic_corpus(29, 120);
    const Vocabulary vocab = build_vocabulary(corpus, 1, 500);
    auto examples = flatten_corpus(corpus, vocab);
    examples.resize(80);

    // pre-train seq2seq until samples are well-formed enough to score
    PolicyConfig cfg;
    cfg.embed_dim = 32;
    PolicyModel model(cfg, vocab, 31);
    TrainOptions pre;
    pre.variant = Variant::kSeq2Seq;
    pre.epochs = 60;
    pre.batch_size = 8;
    pre.seed = 37;
    pre.learning_rate = Real(3e-3);
    const TrainRun prerun = train(model, examples, pre);
    REQUIRE(prerun.final_epoch().mle_loss < 1.0);  // well-formed samples

    // predictor from the synthetic pipeline
    SentimentConfig scfg;
    scfg.embed_dim = 16;
    scfg.hidden_dim = 24;
    scfg.epochs = 8;
    scfg.seed = 41;
    std::vector<SentimentExample> cls_data;
    for (const auto& [text, label] : extract_labeled_utterances(corpus)) {
        cls_data.push_back({text, label});
    }
    SentimentModel classifier = train_sentiment(cls_data, scfg, SentimentKind::kClassifier);
    SentimentModel predictor = train_predictor(label_corpus(classifier, corpus), scfg);

    // a reward-heavy mix: this test checks the REINFORCE machinery moves
    // the policy toward reward, not the lambda=0.25 operating point (the
    // acceptance pipeline covers that)
    TrainOptions rl;
    rl.variant = Variant::kRlLookahead;
    rl.lambda = Real(0.8);
    rl.epochs = 12;
    rl.seed = 43;
    rl.initialized_from_checkpoint = true;
    rl.learning_rate = Real(5e-3);
    const TrainRun run = train(model, examples, rl, nullptr, &predictor);
    REQUIRE(run.final_epoch().mean_reward.has_value());
    REQUIRE(run.epochs.front().mean_reward.has_value());
    const double late = (*run.epochs[run.epochs.size() - 1].mean_reward +
                         *run.epochs[run.epochs.size() - 2].mean_reward) /
                        2.0;
    CHECK(late > *run.epochs.front().mean_reward + 0.1);
    CHECK(run.final_epoch().baseline_loss.has_value());
    CHECK(run.final_epoch().rl_loss.has_value());
    CHECK(run.final_epoch().mean_resp_len.has_value());
}
