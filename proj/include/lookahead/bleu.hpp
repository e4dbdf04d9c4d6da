#pragma once

// Corpus-level BLEU-4: uniform n-gram weights, brevity penalty, single
// reference per hypothesis. Two scores are reported: the primary one applies
// add-one smoothing to the n>=2 modified precisions (responses here are
// short, so higher-order counts are sparse); the unsmoothed score treats any
// zero precision as a zero score. Orders with no candidate n-grams at all
// are left out of the geometric mean.

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "lookahead/common.hpp"

namespace lookahead {

struct BleuStats {
    static constexpr int kMaxOrder = 4;

    std::array<long, kMaxOrder> matched{};  // clipped n-gram matches
    std::array<long, kMaxOrder> total{};    // candidate n-gram counts
    long hypothesis_length = 0;
    long reference_length = 0;

    void add(const std::vector<std::string>& hypothesis,
             const std::vector<std::string>& reference) {
        hypothesis_length += static_cast<long>(hypothesis.size());
        reference_length += static_cast<long>(reference.size());
        for (int n = 1; n <= kMaxOrder; ++n) {
            const auto hyp_counts = ngram_counts(hypothesis, n);
            const auto ref_counts = ngram_counts(reference, n);
            long m = 0, t = 0;
            for (const auto& [gram, count] : hyp_counts) {
                t += count;
                const auto it = ref_counts.find(gram);
                if (it != ref_counts.end()) m += std::min(count, it->second);
            }
            matched[static_cast<std::size_t>(n - 1)] += m;
            total[static_cast<std::size_t>(n - 1)] += t;
        }
    }

    // Modified n-gram precision; -1 when no candidate n-grams of this order.
    double precision(int n) const {
        const long t = total[static_cast<std::size_t>(n - 1)];
        if (t == 0) return -1.0;
        return static_cast<double>(matched[static_cast<std::size_t>(n - 1)]) /
               static_cast<double>(t);
    }

    // Add-one smoothing on orders >= 2; unigram precision stays exact.
    double smoothed_precision(int n) const {
        const long t = total[static_cast<std::size_t>(n - 1)];
        const long m = matched[static_cast<std::size_t>(n - 1)];
        if (n == 1) return t == 0 ? -1.0 : static_cast<double>(m) / static_cast<double>(t);
        return static_cast<double>(m + 1) / static_cast<double>(t + 1);
    }

    double brevity_penalty() const {
        if (hypothesis_length == 0) return 0.0;
        if (hypothesis_length >= reference_length) return 1.0;
        return std::exp(1.0 - static_cast<double>(reference_length) /
                                  static_cast<double>(hypothesis_length));
    }

    double score() const { return combined(/*smoothed=*/true); }
    double score_unsmoothed() const { return combined(/*smoothed=*/false); }

  private:
    double combined(bool smoothed) const {
        double log_sum = 0.0;
        int orders = 0;
        for (int n = 1; n <= kMaxOrder; ++n) {
            const double p = smoothed ? smoothed_precision(n) : precision(n);
            if (p < 0.0) continue;  // no candidate n-grams of this order
            if (p == 0.0) return 0.0;
            log_sum += std::log(p);
            ++orders;
        }
        if (orders == 0) return 0.0;
        return 100.0 * brevity_penalty() * std::exp(log_sum / orders);
    }

    static std::map<std::vector<std::string>, long> ngram_counts(
        const std::vector<std::string>& tokens, int n) {
        std::map<std::vector<std::string>, long> counts;
        if (static_cast<int>(tokens.size()) >= n) {
            for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
                ++counts[std::vector<std::string>(tokens.begin() + static_cast<long>(i),
                                                  tokens.begin() + static_cast<long>(i) + n)];
            }
        }
        return counts;
    }
};

inline BleuStats bleu_stats(const std::vector<std::vector<std::string>>& hypotheses,
                            const std::vector<std::vector<std::string>>& references) {
    if (hypotheses.empty()) throw DataError("bleu: empty hypothesis list");
    if (hypotheses.size() != references.size()) {
        throw DataError("bleu: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                        std::to_string(references.size()) + " references");
    }
    BleuStats stats;
    for (std::size_t i = 0; i < hypotheses.size(); ++i) stats.add(hypotheses[i], references[i]);
    return stats;
}

// Corpus BLEU in [0, 100], add-one smoothed on n>=2.
inline double bleu(const std::vector<std::vector<std::string>>& hypotheses,
                   const std::vector<std::vector<std::string>>& references) {
    return bleu_stats(hypotheses, references).score();
}

}  // namespace lookahead
