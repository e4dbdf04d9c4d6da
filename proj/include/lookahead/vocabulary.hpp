#pragma once

// Token <-> id bijection. Ids 0..3 are PAD, UNK, SOS, EOS in that order;
// remaining entries are corpus tokens sorted by (frequency desc, token asc)
// and truncated to max_size. Out-of-vocabulary tokens encode to UNK.

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "lookahead/common.hpp"
#include "lookahead/tokenizer.hpp"

namespace lookahead {

class Vocabulary {
  public:
    static constexpr int kPadId = 0;
    static constexpr int kUnkId = 1;
    static constexpr int kSosId = 2;
    static constexpr int kEosId = 3;
    static constexpr int kNumSpecials = 4;

    Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

    // `extra` holds the non-special entries in final order.
    explicit Vocabulary(std::vector<std::string> extra) {
        id_to_token_ = {tokens::kPad, tokens::kUnk, tokens::kSos, tokens::kEos};
        id_to_token_.insert(id_to_token_.end(), extra.begin(), extra.end());
        for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
            auto [it, inserted] = token_to_id_.emplace(id_to_token_[i], static_cast<int>(i));
            if (!inserted) throw DataError("duplicate vocabulary token: " + id_to_token_[i]);
        }
    }

    // Builds from token frequency counts.
    static Vocabulary build(const std::map<std::string, long>& counts, long min_freq,
                            std::size_t max_size) {
        if (max_size < kNumSpecials) {
            throw UsageError("vocabulary max_size must be at least " +
                             std::to_string(kNumSpecials) + ", got " + std::to_string(max_size));
        }
        std::vector<std::pair<std::string, long>> entries;
        for (const auto& [token, count] : counts) {
            if (count >= min_freq) entries.emplace_back(token, count);
        }
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (entries.size() > max_size - kNumSpecials) {
            entries.resize(max_size - kNumSpecials);
        }
        std::vector<std::string> extra;
        extra.reserve(entries.size());
        for (auto& [token, count] : entries) extra.push_back(std::move(token));
        return Vocabulary(std::move(extra));
    }

    int size() const { return static_cast<int>(id_to_token_.size()); }

    int id_of(const std::string& token) const {
        auto it = token_to_id_.find(token);
        return it == token_to_id_.end() ? kUnkId : it->second;
    }

    bool contains(const std::string& token) const { return token_to_id_.count(token) > 0; }

    const std::string& token_of(int id) const {
        if (id < 0 || id >= size()) throw DataError("token id out of range: " + std::to_string(id));
        return id_to_token_[static_cast<std::size_t>(id)];
    }

    const std::vector<std::string>& all_tokens() const { return id_to_token_; }

    std::vector<int> encode(const std::vector<std::string>& toks) const {
        std::vector<int> ids;
        ids.reserve(toks.size());
        for (const auto& t : toks) ids.push_back(id_of(t));
        return ids;
    }

    std::vector<int> encode_text(const std::string& text) const { return encode(tokenize(text)); }

    std::vector<std::string> decode(const std::vector<int>& ids) const {
        std::vector<std::string> toks;
        toks.reserve(ids.size());
        for (int id : ids) toks.push_back(token_of(id));
        return toks;
    }

    std::string decode_text(const std::vector<int>& ids) const {
        std::string out;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (i) out += ' ';
            out += token_of(ids[i]);
        }
        return out;
    }

    // Fingerprint embedded in checkpoints so a model is never paired with
    // the wrong token table.
    std::string hash() const {
        std::string joined;
        for (const auto& t : id_to_token_) {
            joined += t;
            joined += '\n';
        }
        return to_hex(fnv1a64(joined));
    }

  private:
    std::vector<std::string> id_to_token_;
    std::unordered_map<std::string, int> token_to_id_;
};

}  // namespace lookahead
