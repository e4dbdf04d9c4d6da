#pragma once

// Automatic evaluation (greedy decoding + BLEU + reward statistics) and the
// blinded sample export for human judging.

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lookahead/bleu.hpp"
#include "lookahead/common.hpp"
#include "lookahead/dialogue.hpp"
#include "lookahead/losses.hpp"
#include "lookahead/policy.hpp"
#include "lookahead/sentiment.hpp"

namespace lookahead {

struct EvalReport {
    double bleu = 0.0;             // smoothed corpus BLEU, [0, 100]
    double bleu_unsmoothed = 0.0;  // companion score for transparency
    std::optional<double> mean_current_sentiment;
    std::optional<double> mean_lookahead_reward;
    double mean_resp_len = 0.0;
    long distinct_responses = 0;
    long n_examples = 0;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["bleu"] = bleu;
        j["bleu_unsmoothed"] = bleu_unsmoothed;
        j["bleu_note"] =
            "tokenization and smoothing are implementation-defined; absolute BLEU values are "
            "not comparable across implementations";
        j["mean_current_sentiment"] =
            mean_current_sentiment ? nlohmann::json(*mean_current_sentiment) : nlohmann::json();
        j["mean_lookahead_reward"] =
            mean_lookahead_reward ? nlohmann::json(*mean_lookahead_reward) : nlohmann::json();
        j["mean_resp_len"] = mean_resp_len;
        j["distinct_responses"] = distinct_responses;
        j["n_examples"] = n_examples;
        return j;
    }
};

// Greedy-decodes every test context and aggregates metrics. Pure function of
// (checkpoint, corpus, reward models); `threads` parallelizes decoding only,
// results are collected in index order.
inline EvalReport evaluate(PolicyModel& model, const std::vector<TrainingExample>& test,
                           const SentimentModel* classifier = nullptr,
                           const SentimentModel* predictor = nullptr, int threads = 1) {
    if (test.empty()) throw DataError("evaluate: empty test set");

    std::vector<std::vector<int>> decoded(test.size());
    const int n_threads = std::max(1, threads);
    if (n_threads == 1) {
        for (std::size_t i = 0; i < test.size(); ++i) {
            decoded[i] = decode_greedy(model, test[i].context_tokens);
        }
    } else {
        std::vector<std::thread> workers;
        for (int w = 0; w < n_threads; ++w) {
            workers.emplace_back([&, w] {
                for (std::size_t i = static_cast<std::size_t>(w); i < test.size();
                     i += static_cast<std::size_t>(n_threads)) {
                    decoded[i] = decode_greedy(model, test[i].context_tokens);
                }
            });
        }
        for (auto& t : workers) t.join();
    }

    std::vector<std::vector<std::string>> hypotheses, references;
    hypotheses.reserve(test.size());
    references.reserve(test.size());
    std::set<std::string> distinct;
    double len_sum = 0, current_sum = 0, lookahead_sum = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const std::string response = model.vocab().decode_text(decoded[i]);
        hypotheses.push_back(model.vocab().decode(decoded[i]));
        references.push_back(tokenize(test[i].target_text));
        distinct.insert(response);
        len_sum += static_cast<double>(decoded[i].size());
        if (classifier) {
            current_sum += compute_reward(RewardMode::kCurrent, test[i].user_text, response,
                                          classifier, nullptr);
        }
        if (predictor) {
            lookahead_sum += compute_reward(RewardMode::kLookahead, test[i].user_text, response,
                                            nullptr, predictor);
        }
    }

    const BleuStats stats = bleu_stats(hypotheses, references);
    EvalReport report;
    report.bleu = stats.score();
    report.bleu_unsmoothed = stats.score_unsmoothed();
    report.mean_resp_len = len_sum / static_cast<double>(test.size());
    report.distinct_responses = static_cast<long>(distinct.size());
    report.n_examples = static_cast<long>(test.size());
    if (classifier) report.mean_current_sentiment = current_sum / static_cast<double>(test.size());
    if (predictor) report.mean_lookahead_reward = lookahead_sum / static_cast<double>(test.size());
    return report;
}

namespace detail {

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

}  // namespace detail

// Annotator instructions embedded in the export header; judges rate each
// response on a 1-5 scale, 5 best.
inline const std::vector<std::string>& human_eval_questions() {
    static const std::vector<std::string> questions = {
        "Empathy / Sympathy: Did the responses from the LISTENER show understanding of the "
        "feelings of the SPEAKER talking about their experience?",
        "Relevance: Did the responses of the LISTENER seem appropriate to the conversation? "
        "Were they on-topic?",
        "Fluency: Could you understand the responses from the LISTENER? Did the language seem "
        "accurate?",
    };
    return questions;
}

// Samples n contexts, decodes every variant on each, and writes blinded CSV
// rows (context, response_code, response_text). The code<->variant bijection
// goes to a separate JSON file so ratings can be unblinded later.
inline void export_human_eval(std::vector<std::pair<std::string, PolicyModel*>> variants,
                              const std::vector<TrainingExample>& test, int n,
                              std::uint64_t seed, const std::string& csv_path,
                              const std::string& blinding_path) {
    if (variants.empty()) throw UsageError("export_human_eval: no variants given");
    if (static_cast<std::size_t>(n) > test.size()) {
        throw DataError("export_human_eval: requested " + std::to_string(n) +
                        " contexts but the test set has " + std::to_string(test.size()));
    }
    Rng rng(seed);
    std::vector<std::size_t> indices(test.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    rng.shuffle(indices);
    indices.resize(static_cast<std::size_t>(n));

    // random code per variant: shuffle the code alphabet
    std::vector<std::string> codes;
    for (std::size_t i = 0; i < variants.size(); ++i) {
        codes.push_back(std::string(1, static_cast<char>('A' + i)));
    }
    rng.shuffle(codes);
    nlohmann::json blinding = nlohmann::json::object();
    std::vector<std::pair<std::string, PolicyModel*>> by_code;  // sorted by code
    for (std::size_t i = 0; i < variants.size(); ++i) {
        blinding[codes[i]] = variants[i].first;
        by_code.emplace_back(codes[i], variants[i].second);
    }
    std::sort(by_code.begin(), by_code.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw DataError("cannot open CSV for writing: " + csv_path);
    csv << "# Rate each response on a scale of 1 to 5 (5 is best) for each question:\n";
    for (const auto& q : human_eval_questions()) csv << "# " << q << "\n";
    csv << "context,response_code,response_text\n";
    for (const std::size_t idx : indices) {
        const TrainingExample& ex = test[idx];
        for (const auto& [code, model] : by_code) {
            const auto response = decode_greedy(*model, ex.context_tokens);
            csv << detail::csv_escape(ex.context_text) << "," << code << ","
                << detail::csv_escape(model->vocab().decode_text(response)) << "\n";
        }
    }
    if (!csv) throw DataError("error writing CSV: " + csv_path);

    std::ofstream bf(blinding_path, std::ios::binary);
    if (!bf) throw DataError("cannot open blinding file for writing: " + blinding_path);
    bf << blinding.dump() << "\n";
}

}  // namespace lookahead
