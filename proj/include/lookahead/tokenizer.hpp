#pragma once

// Whitespace + punctuation tokenizer. Lowercases ASCII letters, splits each
// ASCII punctuation character into its own token, and keeps marker tokens of
// the form <word> (e.g. "<sep>") atomic so flattened contexts survive a
// round trip through text. Bytes >= 0x80 are treated as word characters.

#include <cctype>
#include <string>
#include <vector>

namespace lookahead {

namespace tokens {
inline constexpr const char* kPad = "<pad>";
inline constexpr const char* kUnk = "<unk>";
inline constexpr const char* kSos = "<sos>";
inline constexpr const char* kEos = "<eos>";
inline constexpr const char* kSep = "<sep>";
}  // namespace tokens

namespace detail {

// Matches <letters/underscores> starting at position i; returns length or 0.
inline std::size_t marker_token_length(const std::string& text, std::size_t i) {
    if (text[i] != '<') return 0;
    std::size_t j = i + 1;
    while (j < text.size() && (std::isalpha(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        ++j;
    }
    if (j > i + 1 && j < text.size() && text[j] == '>') return j - i + 1;
    return 0;
}

}  // namespace detail

inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string word;
    auto flush = [&] {
        if (!word.empty()) {
            out.push_back(word);
            word.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            flush();
            continue;
        }
        if (c == '<') {
            if (const std::size_t len = detail::marker_token_length(text, i)) {
                flush();
                std::string marker = text.substr(i, len);
                for (char& ch : marker) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
                out.push_back(marker);
                i += len - 1;
                continue;
            }
        }
        if (c < 0x80 && std::ispunct(c)) {
            flush();
            out.emplace_back(1, static_cast<char>(c));
            continue;
        }
        word.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    }
    flush();
    return out;
}

}  // namespace lookahead
