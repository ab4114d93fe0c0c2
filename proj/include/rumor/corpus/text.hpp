#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rumor::corpus {

namespace detail {

inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// ASCII alnum, underscore, or any non-ASCII byte (UTF-8 letters in hashtags).
inline bool is_word_byte(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') ||
           (u >= 'A' && u <= 'Z') || u == '_';
}

inline bool starts_with_http(std::string_view token) {
    if (token.size() < 4) return false;
    constexpr std::string_view http = "http";
    for (std::size_t i = 0; i < 4; ++i)
        if ((token[i] | 0x20) != http[i]) return false;
    return true;
}

}  // namespace detail

inline std::vector<std::string_view> split_whitespace(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && detail::is_space(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !detail::is_space(text[i])) ++i;
        if (i > start) tokens.push_back(text.substr(start, i - start));
    }
    return tokens;
}

inline bool is_hashtag_token(std::string_view token) {
    return token.size() >= 2 && token[0] == '#' && detail::is_word_byte(token[1]);
}

inline bool is_url_token(std::string_view token) { return detail::starts_with_http(token); }

// Drops hashtag tokens and tokens starting with "http" (any case), collapses
// whitespace runs and trims.
inline std::string clean_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::string_view token : split_whitespace(raw)) {
        if (is_hashtag_token(token) || is_url_token(token)) continue;
        if (!out.empty()) out.push_back(' ');
        out.append(token);
    }
    return out;
}

}  // namespace rumor::corpus
