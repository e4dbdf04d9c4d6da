#pragma once

// End-to-end pipeline: synthetic corpus -> splits -> vocabulary -> sentiment
// classifier -> self-labeling -> look-ahead predictor -> seq2seq (and
// multiseq) -> RL variants from the same pre-trained checkpoint -> held-out
// evaluation -> blinded human-eval export. All artifacts land in one output
// directory; reruns with the same config are byte-identical.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lookahead/config.hpp"
#include "lookahead/corpus_io.hpp"
#include "lookahead/evaluate.hpp"
#include "lookahead/sentiment.hpp"
#include "lookahead/synthetic.hpp"
#include "lookahead/trainer.hpp"

namespace lookahead {

struct PipelineResult {
    std::string out_dir;
    nlohmann::json summary;

    std::string path(const std::string& name) const {
        return (std::filesystem::path(out_dir) / name).string();
    }
};

namespace detail {

struct SplitCorpus {
    std::vector<Dialogue> train, dev, test;
};

inline SplitCorpus split_corpus(const std::vector<Dialogue>& corpus, double train_frac,
                                double dev_frac, std::uint64_t seed) {
    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    const std::size_t n_train = static_cast<std::size_t>(
        static_cast<double>(corpus.size()) * train_frac);
    const std::size_t n_dev = static_cast<std::size_t>(
        static_cast<double>(corpus.size()) * dev_frac);
    SplitCorpus split;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Dialogue& d = corpus[order[i]];
        if (i < n_train) split.train.push_back(d);
        else if (i < n_train + n_dev) split.dev.push_back(d);
        else split.test.push_back(d);
    }
    if (split.train.empty() || split.test.empty()) {
        throw DataError("corpus too small for the requested train/dev/test split");
    }
    return split;
}

inline SentimentConfig sentiment_config(const Config& cfg, std::uint64_t seed) {
    SentimentConfig s;
    s.embed_dim = static_cast<int>(cfg.sent_embed_dim);
    s.hidden_dim = static_cast<int>(cfg.sent_hidden_dim);
    s.learning_rate = static_cast<Real>(cfg.sent_learning_rate);
    s.epochs = static_cast<int>(cfg.sent_epochs);
    s.batch_size = static_cast<int>(cfg.batch_size);
    s.heldout_fraction = cfg.sent_heldout_frac;
    s.min_freq = cfg.min_freq;
    s.max_vocab = static_cast<std::size_t>(cfg.max_vocab);
    s.seed = seed;
    return s;
}

inline PolicyConfig policy_config(const Config& cfg, bool with_emotion_head) {
    PolicyConfig p;
    p.embed_dim = static_cast<int>(cfg.embed_dim);
    p.temperature = static_cast<Real>(cfg.temperature);
    p.max_context_len = static_cast<int>(cfg.max_context_len);
    p.max_decode_len = static_cast<int>(cfg.max_decode_len);
    p.n_emotions = with_emotion_head ? static_cast<int>(cfg.n_emotions) : 0;
    return p;
}

inline FlattenOptions flatten_options(const Config& cfg) {
    FlattenOptions f;
    f.max_context_len = static_cast<int>(cfg.max_context_len);
    f.max_target_len = static_cast<int>(cfg.max_target_len);
    return f;
}

// Classifier training data: labeled utterances from dialogue reactions.
// Synthetic corpora carry construction labels recoverable from sentinel
// words; records with unknown sentiment are skipped.
inline std::vector<SentimentExample> classifier_examples(const std::vector<Dialogue>& corpus) {
    std::vector<SentimentExample> out;
    for (const auto& [text, label] : extract_labeled_utterances(corpus)) {
        out.push_back({text, label});
    }
    return out;
}

}  // namespace detail

inline PipelineResult run_pipeline(const Config& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    PipelineResult result;
    result.out_dir = cfg.out_dir;
    nlohmann::json& summary = result.summary;

    cfg.write_effective(result.path("config.effective.json"));

    // 1. synthetic corpus and splits
    SynthConfig synth_cfg;
    synth_cfg.n_emotions = static_cast<int>(cfg.n_emotions);
    synth_cfg.empathetic_prob = cfg.empathetic_prob;
    const auto corpus =
        generate_synthetic_corpus(cfg.synth_seed(), static_cast<int>(cfg.n_dialogues), synth_cfg);
    save_jsonl(corpus, result.path("corpus.jsonl"));
    const auto split =
        detail::split_corpus(corpus, cfg.train_frac, cfg.dev_frac, cfg.split_seed());
    save_jsonl(split.train, result.path("train.jsonl"));
    save_jsonl(split.dev, result.path("dev.jsonl"));
    save_jsonl(split.test, result.path("test.jsonl"));
    summary["data"] = {{"n_dialogues", corpus.size()},
                       {"n_train", split.train.size()},
                       {"n_dev", split.dev.size()},
                       {"n_test", split.test.size()}};

    // 2. policy vocabulary from the training split
    const Vocabulary vocab = build_vocabulary(split.train, cfg.min_freq,
                                              static_cast<std::size_t>(cfg.max_vocab));
    save_vocab(vocab, result.path("vocab.json"));
    summary["data"]["vocab_size"] = vocab.size();

    const auto flatten_opts = detail::flatten_options(cfg);
    const auto train_examples = flatten_corpus(split.train, vocab, flatten_opts);
    const auto test_examples = flatten_corpus(split.test, vocab, flatten_opts);

    // 3. sentiment classifier on construction-labeled reactions
    SentimentTrainReport cls_report;
    const SentimentModel classifier =
        train_sentiment(detail::classifier_examples(split.train),
                        detail::sentiment_config(cfg, cfg.classifier_seed()),
                        SentimentKind::kClassifier, &cls_report);
    classifier.save(result.path("classifier.json"));

    // 4. self-labeling pass over the training dialogues
    const auto labeled = label_corpus(classifier, split.train, cfg.label_threshold);
    save_labeled_contexts(labeled, result.path("labels.jsonl"));
    long agree = 0, known = 0;
    {
        std::size_t idx = 0;
        for (const auto& d : split.train) {
            for (std::size_t next_user = 2; next_user < d.turns.size(); next_user += 2, ++idx) {
                if (const auto truth = synth::reaction_sentiment(d.turns[next_user].text)) {
                    agree += (labeled[idx].label == *truth);
                    ++known;
                }
            }
        }
    }
    summary["sentiment"] = {{"classifier_heldout_accuracy", cls_report.heldout_accuracy},
                            {"n_labeled_contexts", labeled.size()},
                            {"label_agreement", known > 0 ? nlohmann::json(
                                 static_cast<double>(agree) / static_cast<double>(known))
                                                          : nlohmann::json()}};

    // 5. look-ahead predictor on the self-labeled contexts
    SentimentTrainReport pred_report;
    const SentimentModel predictor = train_predictor(
        labeled, detail::sentiment_config(cfg, cfg.predictor_seed()), &pred_report);
    predictor.save(result.path("predictor.json"));
    summary["sentiment"]["predictor_heldout_accuracy"] = pred_report.heldout_accuracy;

    const auto evaluate_variant = [&](PolicyModel& model, const std::string& name) {
        const EvalReport report = evaluate(model, test_examples, &classifier, &predictor,
                                           static_cast<int>(cfg.threads));
        std::ofstream out(result.path("report_" + name + ".json"), std::ios::binary);
        out << report.to_json().dump(2) << '\n';
        summary["variants"][name] = report.to_json();
    };

    // 6. seq2seq pre-training
    PolicyModel seq2seq(detail::policy_config(cfg, false), vocab, cfg.policy_seed());
    if (!cfg.embedding_file.empty()) seq2seq.load_external_embeddings(cfg.embedding_file);
    {
        TrainOptions opts;
        opts.variant = Variant::kSeq2Seq;
        opts.learning_rate = static_cast<Real>(cfg.learning_rate);
        opts.epochs = static_cast<int>(cfg.policy_epochs);
        opts.batch_size = static_cast<int>(cfg.batch_size);
        opts.seed = cfg.policy_seed();
        opts.checkpoint_every = static_cast<int>(cfg.checkpoint_every);
        opts.checkpoint_path = result.path("seq2seq");
        opts.metrics_path = result.path("seq2seq.metrics.jsonl");
        train(seq2seq, train_examples, opts);
        seq2seq.save(result.path("seq2seq.json"));
        evaluate_variant(seq2seq, "seq2seq");
    }

    // 7. multiseq (multi-task emotion prediction), optional
    if (cfg.train_multiseq) {
        PolicyModel multiseq(detail::policy_config(cfg, true), vocab, cfg.multiseq_seed());
        if (!cfg.embedding_file.empty()) multiseq.load_external_embeddings(cfg.embedding_file);
        TrainOptions opts;
        opts.variant = Variant::kMultiSeq;
        opts.learning_rate = static_cast<Real>(cfg.learning_rate);
        opts.epochs = static_cast<int>(cfg.policy_epochs);
        opts.batch_size = static_cast<int>(cfg.batch_size);
        opts.seed = cfg.multiseq_seed();
        opts.emotion_labels = std::vector<std::string>(
            synth::emotion_families().begin(),
            synth::emotion_families().begin() + cfg.n_emotions);
        opts.metrics_path = result.path("multiseq.metrics.jsonl");
        train(multiseq, train_examples, opts);
        multiseq.save(result.path("multiseq.json"),
                      {{"emotion_labels", opts.emotion_labels}});
        evaluate_variant(multiseq, "multiseq");
    }

    // 8. RL variants, both starting from the same pre-trained checkpoint
    const auto train_rl = [&](Variant variant, const std::string& name, std::uint64_t seed) {
        PolicyModel model = PolicyModel::load(result.path("seq2seq.json"));
        TrainOptions opts;
        opts.variant = variant;
        opts.lambda = static_cast<Real>(cfg.lambda);
        opts.learning_rate = static_cast<Real>(cfg.rl_learning_rate);
        opts.epochs = static_cast<int>(cfg.rl_epochs);
        opts.batch_size = static_cast<int>(cfg.batch_size);
        opts.seed = seed;
        opts.initialized_from_checkpoint = true;
        opts.metrics_path = result.path(name + ".metrics.jsonl");
        train(model, train_examples, opts, &classifier, &predictor);
        model.save(result.path(name + ".json"));
        evaluate_variant(model, name);
    };
    train_rl(Variant::kRlCurrent, "rl_current", cfg.rl_current_seed());
    train_rl(Variant::kRlLookahead, "rl_lookahead", cfg.rl_lookahead_seed());

    // 9. blinded human-eval export over all trained variants
    {
        PolicyModel m_seq = PolicyModel::load(result.path("seq2seq.json"));
        PolicyModel m_cur = PolicyModel::load(result.path("rl_current.json"));
        PolicyModel m_look = PolicyModel::load(result.path("rl_lookahead.json"));
        std::vector<std::pair<std::string, PolicyModel*>> variants = {
            {"seq2seq", &m_seq}, {"rl-current", &m_cur}, {"rl-lookahead", &m_look}};
        PolicyModel m_multi;
        if (cfg.train_multiseq) {
            m_multi = PolicyModel::load(result.path("multiseq.json"));
            variants.insert(variants.begin() + 1, {"multiseq", &m_multi});
        }
        const int n = static_cast<int>(
            std::min<std::size_t>(static_cast<std::size_t>(cfg.human_eval_n),
                                  test_examples.size()));
        export_human_eval(variants, test_examples, n, cfg.human_eval_seed(),
                          result.path("human_eval.csv"),
                          result.path("human_eval.blinding.json"));
        summary["human_eval"] = {{"n_contexts", n}, {"n_variants", variants.size()}};
    }

    std::ofstream out(result.path("summary.json"), std::ios::binary);
    out << summary.dump(2) << '\n';
    return result;
}

}  // namespace lookahead
