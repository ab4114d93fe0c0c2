#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "rumor/core/errors.hpp"

namespace rumor {

enum class Veracity : std::uint8_t { True = 0, False = 1, Unverified = 2 };
enum class Certainty : std::uint8_t { Certain = 0, Uncertain = 1 };
enum class Stance : std::uint8_t { Agreement = 0, Disagreement = 1, None = 2 };
enum class Channel : std::uint8_t { Lie = 0, Agreement = 1 };
enum class Platform : std::uint8_t { Twitter = 0, Reddit = 1 };

inline constexpr std::array<Veracity, 3> kVeracities{Veracity::True, Veracity::False,
                                                     Veracity::Unverified};

template <typename E>
constexpr std::size_t index_of(E e) noexcept {
    return static_cast<std::size_t>(e);
}

inline std::string_view to_string(Veracity v) {
    switch (v) {
        case Veracity::True: return "true";
        case Veracity::False: return "false";
        case Veracity::Unverified: return "unverified";
    }
    return "?";
}

inline std::string_view to_string(Certainty c) {
    return c == Certainty::Certain ? "certain" : "uncertain";
}

inline std::string_view to_string(Stance s) {
    switch (s) {
        case Stance::Agreement: return "agreement";
        case Stance::Disagreement: return "disagreement";
        case Stance::None: return "none";
    }
    return "?";
}

inline std::string_view to_string(Channel c) { return c == Channel::Lie ? "lie" : "agreement"; }

inline std::string_view to_string(Platform p) { return p == Platform::Twitter ? "twitter" : "reddit"; }

inline std::optional<Veracity> parse_veracity(std::string_view s) {
    if (s == "true") return Veracity::True;
    if (s == "false") return Veracity::False;
    if (s == "unverified") return Veracity::Unverified;
    return std::nullopt;
}

inline std::optional<Certainty> parse_certainty(std::string_view s) {
    if (s == "certain") return Certainty::Certain;
    if (s == "uncertain") return Certainty::Uncertain;
    return std::nullopt;
}

inline std::optional<Stance> parse_stance(std::string_view s) {
    if (s == "agreement" || s == "agree") return Stance::Agreement;
    if (s == "disagreement" || s == "disagree") return Stance::Disagreement;
    if (s == "none") return Stance::None;
    return std::nullopt;
}

inline std::optional<Channel> parse_channel(std::string_view s) {
    if (s == "lie") return Channel::Lie;
    if (s == "agreement") return Channel::Agreement;
    return std::nullopt;
}

inline std::optional<Platform> parse_platform(std::string_view s) {
    if (s == "twitter") return Platform::Twitter;
    if (s == "reddit") return Platform::Reddit;
    return std::nullopt;
}

// Parses or throws CorpusFormatError naming the field.
template <typename E, typename Parser>
E require_label(std::string_view text, Parser parse, std::string_view field) {
    if (auto v = parse(text)) return *v;
    throw CorpusFormatError("unknown " + std::string(field) + " label '" + std::string(text) + "'");
}

}  // namespace rumor
