// Command-line surface for the look-ahead dialogue trainer. Every
// subcommand prints one machine-readable JSON result line on success and
// exits nonzero with a diagnostic on failure:
//   0 success, 1 usage error, 2 data error, 3 training precondition error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lookahead/lookahead.hpp"

namespace {

using namespace lookahead;

void print_result(const nlohmann::json& j) { std::cout << j.dump() << std::endl; }

// Registers one "--key value" override flag per config key.
void add_config_flags(CLI::App* cmd, std::shared_ptr<std::map<std::string, std::string>> overrides) {
    for (const auto& key : Config::keys()) {
        cmd->add_option_function<std::string>(
            "--" + key,
            [overrides, key](const std::string& value) { (*overrides)[key] = value; },
            "override config key '" + key + "'");
    }
}

Config resolve_config(const std::string& config_path,
                      const std::map<std::string, std::string>& overrides) {
    Config cfg = config_path.empty() ? Config() : Config::load(config_path);
    for (const auto& [key, value] : overrides) cfg.apply_override(key, value);
    cfg.validate();
    return cfg;
}

void write_sidecar(const Config& cfg, const std::string& artifact_path) {
    cfg.write_effective(artifact_path + ".config.json");
}

SentimentConfig sentiment_config_from(const Config& cfg, std::uint64_t seed) {
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

FlattenOptions flatten_options_from(const Config& cfg) {
    FlattenOptions f;
    f.max_context_len = static_cast<int>(cfg.max_context_len);
    f.max_target_len = static_cast<int>(cfg.max_target_len);
    return f;
}

// Labeled utterances for classifier training. Accepts either the dialogue
// corpus schema (labels recovered from the synthetic construction) or plain
// {"text": str, "label": 0|1} records.
std::vector<SentimentExample> load_classifier_data(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open training data: " + path);
    std::string first_line;
    std::getline(in, first_line);
    nlohmann::json probe;
    try {
        probe = nlohmann::json::parse(first_line);
    } catch (const std::exception& e) {
        throw DataError(path + ":1: malformed record: " + e.what());
    }
    std::vector<SentimentExample> out;
    if (probe.contains("turns")) {
        for (const auto& [text, label] : extract_labeled_utterances(load_jsonl(path))) {
            out.push_back({text, label});
        }
        if (out.empty()) {
            throw DataError("no construction-labeled utterances found in corpus: " + path);
        }
        return out;
    }
    in.clear();
    in.seekg(0);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            out.push_back({j.at("text").get<std::string>(), j.at("label").get<int>()});
        } catch (const std::exception& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": malformed record: " +
                            e.what());
        }
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"Empathetic dialogue training with a user-sentiment look-ahead reward"};
    app.require_subcommand(1);

    // ---- synth-data ----
    auto* synth = app.add_subcommand("synth-data", "generate the synthetic dialogue corpus");
    std::uint64_t synth_seed = 1;
    long synth_n = 500;
    std::string synth_out;
    long synth_emotions = 4;
    double synth_emp_prob = SynthConfig().empathetic_prob;
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--n", synth_n, "number of dialogues")->required();
    synth->add_option("--out", synth_out, "output JSONL path")->required();
    synth->add_option("--emotions", synth_emotions, "emotion families (1..4)");
    synth->add_option("--empathetic-prob", synth_emp_prob, "base empathetic reply probability");

    // ---- build-vocab ----
    auto* bv = app.add_subcommand("build-vocab", "build a vocabulary from a corpus");
    std::string bv_in, bv_out;
    long bv_min_freq = 1, bv_max_size = 5000;
    bv->add_option("--in", bv_in, "corpus JSONL")->required();
    bv->add_option("--out", bv_out, "vocabulary JSON output")->required();
    bv->add_option("--min-freq", bv_min_freq, "minimum token frequency");
    bv->add_option("--max-size", bv_max_size, "maximum vocabulary size");

    // ---- train-classifier ----
    auto* tc = app.add_subcommand("train-classifier", "train the sentiment classifier");
    std::string tc_data, tc_out, tc_config;
    auto tc_over = std::make_shared<std::map<std::string, std::string>>();
    tc->add_option("--data", tc_data, "dialogue corpus or labeled-utterance JSONL")->required();
    tc->add_option("--out", tc_out, "classifier checkpoint output")->required();
    tc->add_option("--config", tc_config, "config JSON file");
    add_config_flags(tc, tc_over);

    // ---- label-sentiment ----
    auto* ls = app.add_subcommand("label-sentiment", "self-label dialogue contexts");
    std::string ls_classifier, ls_dialogues, ls_out, ls_config;
    auto ls_over = std::make_shared<std::map<std::string, std::string>>();
    ls->add_option("--classifier", ls_classifier, "classifier checkpoint")->required();
    ls->add_option("--dialogues", ls_dialogues, "dialogue corpus JSONL")->required();
    ls->add_option("--out", ls_out, "labeled-context JSONL output")->required();
    ls->add_option("--config", ls_config, "config JSON file");
    add_config_flags(ls, ls_over);

    // ---- train-predictor ----
    auto* tp = app.add_subcommand("train-predictor", "train the look-ahead sentiment predictor");
    std::string tp_labels, tp_out, tp_config;
    auto tp_over = std::make_shared<std::map<std::string, std::string>>();
    tp->add_option("--labels", tp_labels, "labeled-context JSONL from label-sentiment")
        ->required();
    tp->add_option("--out", tp_out, "predictor checkpoint output")->required();
    tp->add_option("--config", tp_config, "config JSON file");
    add_config_flags(tp, tp_over);

    // ---- train ----
    auto* tr = app.add_subcommand("train", "train a policy variant");
    std::string tr_variant, tr_config, tr_data, tr_init, tr_out, tr_vocab, tr_metrics;
    std::string tr_classifier, tr_predictor;
    auto tr_over = std::make_shared<std::map<std::string, std::string>>();
    tr->add_option("--variant", tr_variant, "seq2seq|multiseq|rl-current|rl-lookahead")
        ->required();
    tr->add_option("--config", tr_config, "config JSON file");
    tr->add_option("--data", tr_data, "training corpus JSONL (or config train_data)");
    tr->add_option("--init", tr_init, "pre-trained checkpoint (required for RL variants)");
    tr->add_option("--out", tr_out, "checkpoint output")->required();
    tr->add_option("--vocab", tr_vocab, "vocabulary JSON (otherwise built from data)");
    tr->add_option("--metrics", tr_metrics, "metrics JSONL output (default <out>.metrics.jsonl)");
    tr->add_option("--classifier", tr_classifier, "classifier checkpoint (rl-current)");
    tr->add_option("--predictor", tr_predictor, "predictor checkpoint (rl-lookahead)");
    add_config_flags(tr, tr_over);

    // ---- evaluate ----
    auto* ev = app.add_subcommand("evaluate", "evaluate a checkpoint on a test corpus");
    std::string ev_ckpt, ev_test, ev_report, ev_classifier, ev_predictor, ev_config;
    auto ev_over = std::make_shared<std::map<std::string, std::string>>();
    ev->add_option("--checkpoint", ev_ckpt, "policy checkpoint")->required();
    ev->add_option("--test", ev_test, "test corpus JSONL")->required();
    ev->add_option("--report", ev_report, "evaluation report JSON output")->required();
    ev->add_option("--classifier", ev_classifier, "classifier checkpoint for sentiment means");
    ev->add_option("--predictor", ev_predictor, "predictor checkpoint for look-ahead means");
    ev->add_option("--config", ev_config, "config JSON file");
    add_config_flags(ev, ev_over);

    // ---- export-human-eval ----
    auto* he = app.add_subcommand("export-human-eval", "export blinded samples for human judging");
    std::vector<std::string> he_checkpoints;
    std::string he_test, he_out, he_config;
    long he_n = 50;
    std::uint64_t he_seed = 1;
    auto he_over = std::make_shared<std::map<std::string, std::string>>();
    he->add_option("--checkpoints", he_checkpoints, "variant=checkpoint pairs")
        ->required()
        ->expected(-1);
    he->add_option("--test", he_test, "test corpus JSONL")->required();
    he->add_option("--n", he_n, "contexts to sample");
    he->add_option("--seed", he_seed, "sampling seed");
    he->add_option("--out", he_out, "CSV output path")->required();
    he->add_option("--config", he_config, "config JSON file");
    add_config_flags(he, he_over);

    // ---- chat ----
    auto* ch = app.add_subcommand("chat", "interactive REPL against a checkpoint");
    std::string ch_ckpt;
    ch->add_option("--checkpoint", ch_ckpt, "policy checkpoint")->required();

    // ---- pipeline ----
    auto* pl = app.add_subcommand("pipeline", "run the full chain end to end");
    std::string pl_config;
    auto pl_over = std::make_shared<std::map<std::string, std::string>>();
    pl->add_option("--config", pl_config, "config JSON file");
    add_config_flags(pl, pl_over);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // usage error
    }

    if (synth->parsed()) {
        SynthConfig sc;
        sc.n_emotions = static_cast<int>(synth_emotions);
        sc.empathetic_prob = synth_emp_prob;
        const auto corpus = generate_synthetic_corpus(synth_seed, static_cast<int>(synth_n), sc);
        save_jsonl(corpus, synth_out);
        Config cfg;
        cfg.seed = synth_seed;
        cfg.n_dialogues = synth_n;
        cfg.n_emotions = synth_emotions;
        cfg.empathetic_prob = synth_emp_prob;
        write_sidecar(cfg, synth_out);
        print_result({{"ok", true},
                      {"command", "synth-data"},
                      {"out", synth_out},
                      {"n_dialogues", corpus.size()}});
        return 0;
    }

    if (bv->parsed()) {
        const auto corpus = load_jsonl(bv_in);
        const Vocabulary vocab =
            build_vocabulary(corpus, bv_min_freq, static_cast<std::size_t>(bv_max_size));
        save_vocab(vocab, bv_out);
        Config cfg;
        cfg.min_freq = bv_min_freq;
        cfg.max_vocab = bv_max_size;
        write_sidecar(cfg, bv_out);
        print_result({{"ok", true},
                      {"command", "build-vocab"},
                      {"out", bv_out},
                      {"vocab_size", vocab.size()},
                      {"hash", vocab.hash()}});
        return 0;
    }

    if (tc->parsed()) {
        const Config cfg = resolve_config(tc_config, *tc_over);
        SentimentTrainReport report;
        const SentimentModel model =
            train_sentiment(load_classifier_data(tc_data),
                            sentiment_config_from(cfg, cfg.classifier_seed()),
                            SentimentKind::kClassifier, &report);
        model.save(tc_out);
        write_sidecar(cfg, tc_out);
        print_result({{"ok", true},
                      {"command", "train-classifier"},
                      {"out", tc_out},
                      {"heldout_accuracy", report.heldout_accuracy},
                      {"train_examples", report.train_examples}});
        return 0;
    }

    if (ls->parsed()) {
        const Config cfg = resolve_config(ls_config, *ls_over);
        const SentimentModel classifier = SentimentModel::load(ls_classifier);
        const auto labeled =
            label_corpus(classifier, load_jsonl(ls_dialogues), cfg.label_threshold);
        save_labeled_contexts(labeled, ls_out);
        write_sidecar(cfg, ls_out);
        long positive = 0;
        for (const auto& rec : labeled) positive += rec.label;
        print_result({{"ok", true},
                      {"command", "label-sentiment"},
                      {"out", ls_out},
                      {"n_contexts", labeled.size()},
                      {"n_positive", positive}});
        return 0;
    }

    if (tp->parsed()) {
        const Config cfg = resolve_config(tp_config, *tp_over);
        const auto labeled = load_labeled_contexts(tp_labels);
        if (labeled.empty()) {
            throw PreconditionError("labels file is empty (run label-sentiment first): " +
                                    tp_labels);
        }
        SentimentTrainReport report;
        const SentimentModel model = train_predictor(
            labeled, sentiment_config_from(cfg, cfg.predictor_seed()), &report);
        model.save(tp_out);
        write_sidecar(cfg, tp_out);
        print_result({{"ok", true},
                      {"command", "train-predictor"},
                      {"out", tp_out},
                      {"heldout_accuracy", report.heldout_accuracy}});
        return 0;
    }

    if (tr->parsed()) {
        const Config cfg = resolve_config(tr_config, *tr_over);
        const Variant variant = variant_from_name(tr_variant);
        const std::string data_path = !tr_data.empty() ? tr_data : cfg.train_data;
        if (data_path.empty()) {
            throw UsageError("train needs --data or the train_data config key");
        }
        if (is_rl_variant(variant) && tr_init.empty()) {
            throw PreconditionError(
                "RL variants require --init with a pre-trained seq2seq checkpoint");
        }
        const auto corpus = load_jsonl(data_path);

        PolicyModel model;
        std::vector<std::string> emotion_labels;
        if (!tr_init.empty()) {
            model = PolicyModel::load(tr_init);
        } else {
            Vocabulary vocab =
                !tr_vocab.empty()
                    ? load_vocab(tr_vocab)
                    : build_vocabulary(corpus, cfg.min_freq,
                                       static_cast<std::size_t>(cfg.max_vocab));
            PolicyConfig pc;
            pc.embed_dim = static_cast<int>(cfg.embed_dim);
            pc.temperature = static_cast<Real>(cfg.temperature);
            pc.max_context_len = static_cast<int>(cfg.max_context_len);
            pc.max_decode_len = static_cast<int>(cfg.max_decode_len);
            if (variant == Variant::kMultiSeq) {
                std::set<std::string> labels;
                for (const auto& d : corpus) {
                    if (d.emotion) labels.insert(*d.emotion);
                }
                if (labels.empty()) {
                    throw DataError("multiseq needs dialogues with emotion labels");
                }
                emotion_labels.assign(labels.begin(), labels.end());
                pc.n_emotions = static_cast<int>(emotion_labels.size());
            }
            model = PolicyModel(pc, std::move(vocab),
                                variant == Variant::kMultiSeq ? cfg.multiseq_seed()
                                                              : cfg.policy_seed());
            if (!cfg.embedding_file.empty()) model.load_external_embeddings(cfg.embedding_file);
        }

        std::optional<SentimentModel> classifier, predictor;
        if (!tr_classifier.empty()) classifier = SentimentModel::load(tr_classifier);
        if (!tr_predictor.empty()) predictor = SentimentModel::load(tr_predictor);

        TrainOptions opts;
        opts.variant = variant;
        opts.lambda = static_cast<Real>(cfg.lambda);
        opts.learning_rate = static_cast<Real>(is_rl_variant(variant) ? cfg.rl_learning_rate
                                                                      : cfg.learning_rate);
        opts.epochs =
            static_cast<int>(is_rl_variant(variant) ? cfg.rl_epochs : cfg.policy_epochs);
        opts.batch_size = static_cast<int>(cfg.batch_size);
        opts.seed = variant == Variant::kRlCurrent     ? cfg.rl_current_seed()
                    : variant == Variant::kRlLookahead ? cfg.rl_lookahead_seed()
                    : variant == Variant::kMultiSeq    ? cfg.multiseq_seed()
                                                       : cfg.policy_seed();
        opts.initialized_from_checkpoint = !tr_init.empty();
        opts.emotion_labels = emotion_labels;
        opts.checkpoint_every = static_cast<int>(cfg.checkpoint_every);
        opts.checkpoint_path = tr_out;
        opts.metrics_path = tr_metrics.empty() ? tr_out + ".metrics.jsonl" : tr_metrics;

        const auto examples = flatten_corpus(corpus, model.vocab(), flatten_options_from(cfg));
        const TrainRun run = train(model, examples, opts,
                                   classifier ? &*classifier : nullptr,
                                   predictor ? &*predictor : nullptr);
        model.save(tr_out, emotion_labels.empty()
                               ? nlohmann::json::object()
                               : nlohmann::json{{"emotion_labels", emotion_labels}});
        write_sidecar(cfg, tr_out);
        print_result({{"ok", true},
                      {"command", "train"},
                      {"variant", tr_variant},
                      {"out", tr_out},
                      {"epochs", run.epochs.size()},
                      {"final_mle_loss", run.final_epoch().mle_loss},
                      {"metrics", opts.metrics_path}});
        return 0;
    }

    if (ev->parsed()) {
        const Config cfg = resolve_config(ev_config, *ev_over);
        PolicyModel model = PolicyModel::load(ev_ckpt);
        std::optional<SentimentModel> classifier, predictor;
        if (!ev_classifier.empty()) classifier = SentimentModel::load(ev_classifier);
        if (!ev_predictor.empty()) predictor = SentimentModel::load(ev_predictor);
        const auto examples =
            flatten_corpus(load_jsonl(ev_test), model.vocab(), flatten_options_from(cfg));
        const EvalReport report =
            evaluate(model, examples, classifier ? &*classifier : nullptr,
                     predictor ? &*predictor : nullptr, static_cast<int>(cfg.threads));
        std::ofstream out(ev_report, std::ios::binary);
        if (!out) throw DataError("cannot write report: " + ev_report);
        out << report.to_json().dump(2) << '\n';
        write_sidecar(cfg, ev_report);
        nlohmann::json result = report.to_json();
        result["ok"] = true;
        result["command"] = "evaluate";
        result["report"] = ev_report;
        print_result(result);
        return 0;
    }

    if (he->parsed()) {
        const Config cfg = resolve_config(he_config, *he_over);
        std::vector<std::pair<std::string, PolicyModel>> loaded;
        for (const auto& spec : he_checkpoints) {
            const auto eq = spec.find('=');
            if (eq == std::string::npos) {
                throw UsageError("--checkpoints entries must look like variant=path, got '" +
                                 spec + "'");
            }
            loaded.emplace_back(spec.substr(0, eq), PolicyModel::load(spec.substr(eq + 1)));
        }
        if (loaded.empty()) throw UsageError("no checkpoints given");
        const auto examples = flatten_corpus(load_jsonl(he_test), loaded.front().second.vocab(),
                                             flatten_options_from(cfg));
        std::vector<std::pair<std::string, PolicyModel*>> variants;
        for (auto& [name, model] : loaded) variants.emplace_back(name, &model);
        const std::string blinding_path = he_out + ".blinding.json";
        export_human_eval(variants, examples, static_cast<int>(he_n), he_seed, he_out,
                          blinding_path);
        write_sidecar(cfg, he_out);
        print_result({{"ok", true},
                      {"command", "export-human-eval"},
                      {"out", he_out},
                      {"blinding", blinding_path},
                      {"rows", he_n * static_cast<long>(variants.size())}});
        return 0;
    }

    if (ch->parsed()) {
        PolicyModel model = PolicyModel::load(ch_ckpt);
        const int max_ctx = model.config().max_context_len;
        std::string prev_response;
        long turns = 0;
        std::string line;
        while (std::getline(std::cin, line)) {
            if (tokenize(line).empty()) continue;
            std::vector<std::string> context_tokens;
            if (!prev_response.empty()) {
                context_tokens = tokenize(prev_response);
                context_tokens.push_back(tokens::kSep);
            }
            for (auto& t : tokenize(line)) context_tokens.push_back(std::move(t));
            std::vector<int> ids = model.vocab().encode(context_tokens);
            if (static_cast<int>(ids.size()) > max_ctx) {
                ids.erase(ids.begin(), ids.end() - max_ctx);
            }
            const auto response_ids = decode_greedy(model, ids);
            prev_response = model.vocab().decode_text(response_ids);
            std::cout << prev_response << std::endl;
            ++turns;
        }
        print_result({{"ok", true}, {"command", "chat"}, {"turns", turns}});
        return 0;
    }

    if (pl->parsed()) {
        const Config cfg = resolve_config(pl_config, *pl_over);
        const PipelineResult result = run_pipeline(cfg);
        print_result({{"ok", true},
                      {"command", "pipeline"},
                      {"out_dir", result.out_dir},
                      {"summary", result.path("summary.json")}});
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const lookahead::UsageError& e) {
        std::cerr << "usage error: " << e.what() << std::endl;
        return 1;
    } catch (const lookahead::PreconditionError& e) {
        std::cerr << "precondition error: " << e.what() << std::endl;
        return 3;
    } catch (const lookahead::DataError& e) {
        std::cerr << "data error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
}
