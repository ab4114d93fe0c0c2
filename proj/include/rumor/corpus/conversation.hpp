#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rumor/core/errors.hpp"
#include "rumor/core/labels.hpp"
#include "rumor/corpus/text.hpp"
#include "rumor/corpus/timestamp.hpp"

namespace rumor::corpus {

struct Post {
    std::string id;
    std::string text_raw;
    std::string text_clean;
    Timestamp created_at{};
    Platform platform = Platform::Twitter;

    friend bool operator==(const Post&, const Post&) = default;
};

inline Post make_post(std::string id, std::string text_raw, Timestamp created_at, Platform platform) {
    Post p;
    p.id = std::move(id);
    p.text_clean = clean_text(text_raw);
    p.text_raw = std::move(text_raw);
    p.created_at = created_at;
    p.platform = platform;
    return p;
}

struct Reply {
    Post post;
    std::string parent_id;
    bool is_primary = false;

    friend bool operator==(const Reply&, const Reply&) = default;
};

struct Conversation {
    Post thread;
    std::vector<Reply> replies;  // sorted by (created_at, id)
    std::optional<Veracity> gold_label;

    std::size_t primary_count() const {
        return static_cast<std::size_t>(
            std::count_if(replies.begin(), replies.end(), [](const Reply& r) { return r.is_primary; }));
    }

    friend bool operator==(const Conversation&, const Conversation&) = default;
};

struct ThreadReplyPair {
    std::string thread_text;
    std::string reply_text;
    std::string thread_id;
    std::optional<Stance> gold_stance;

    friend bool operator==(const ThreadReplyPair&, const ThreadReplyPair&) = default;
};

// Gold veracity -> stance target for fine-tuning the agreement classifier.
// Unverified threads either label their pairs `none` or are skipped.
struct StanceMapping {
    bool skip_unverified = false;

    std::optional<Stance> operator()(Veracity v) const {
        switch (v) {
            case Veracity::True: return Stance::Agreement;
            case Veracity::False: return Stance::Disagreement;
            case Veracity::Unverified:
                if (skip_unverified) return std::nullopt;
                return Stance::None;
        }
        return std::nullopt;
    }
};

inline void sort_replies(std::vector<Reply>& replies) {
    std::stable_sort(replies.begin(), replies.end(), [](const Reply& a, const Reply& b) {
        if (a.post.created_at != b.post.created_at) return a.post.created_at < b.post.created_at;
        return a.post.id < b.post.id;
    });
}

// Checks the tree invariants: unique non-empty ids, every parent known,
// no cycles, primary flag consistent with the parent, stable reply order.
inline void validate(const Conversation& conv) {
    const std::string where = "conversation '" + conv.thread.id + "': ";
    if (conv.thread.id.empty()) throw MalformedStructure(where + "missing source post id");

    std::unordered_map<std::string, const Reply*> by_id;
    for (const Reply& r : conv.replies) {
        if (r.post.id.empty()) throw MalformedStructure(where + "reply with empty id");
        if (r.post.id == conv.thread.id || !by_id.emplace(r.post.id, &r).second)
            throw MalformedStructure(where + "duplicate post id '" + r.post.id + "'");
    }
    for (const Reply& r : conv.replies) {
        if (r.parent_id != conv.thread.id && !by_id.contains(r.parent_id))
            throw MalformedStructure(where + "reply '" + r.post.id + "' has unknown parent '" +
                                     r.parent_id + "'");
        if (r.is_primary != (r.parent_id == conv.thread.id))
            throw MalformedStructure(where + "reply '" + r.post.id + "' has inconsistent primary flag");
        // Walk to the root; more steps than replies means a cycle.
        std::string cursor = r.parent_id;
        std::size_t steps = 0;
        while (cursor != conv.thread.id) {
            if (++steps > conv.replies.size())
                throw MalformedStructure(where + "cycle through reply '" + r.post.id + "'");
            cursor = by_id.at(cursor)->parent_id;
        }
    }
    for (std::size_t i = 1; i < conv.replies.size(); ++i) {
        const Post& a = conv.replies[i - 1].post;
        const Post& b = conv.replies[i].post;
        if (b.created_at < a.created_at || (b.created_at == a.created_at && b.id < a.id))
            throw MalformedStructure(where + "replies not in (created_at, id) order");
    }
}

// Keeps replies posted at most window_days * 86400 s after the thread
// (inclusive). A reply whose parent did not survive is dropped with it.
inline Conversation filter_window(const Conversation& conv, int window_days) {
    if (window_days <= 0) throw UsageError("window_days must be positive");
    const auto limit = conv.thread.created_at + std::chrono::seconds{window_days * kSecondsPerDay};

    Conversation out;
    out.thread = conv.thread;
    out.gold_label = conv.gold_label;

    std::unordered_map<std::string, const Reply*> by_id;
    for (const Reply& r : conv.replies) by_id.emplace(r.post.id, &r);

    // Memoized walk toward the root.
    std::unordered_map<std::string, bool> fate;
    auto survives = [&](const Reply& reply, auto& self) -> bool {
        if (auto it = fate.find(reply.post.id); it != fate.end()) return it->second;
        bool ok = reply.post.created_at <= limit;
        if (ok && !reply.is_primary) {
            auto parent = by_id.find(reply.parent_id);
            ok = parent != by_id.end() && self(*parent->second, self);
        }
        fate[reply.post.id] = ok;
        return ok;
    };
    for (const Reply& r : conv.replies)
        if (survives(r, survives)) out.replies.push_back(r);
    return out;
}

inline std::vector<ThreadReplyPair> primary_pairs(const Conversation& conv,
                                                  std::optional<StanceMapping> mapping = std::nullopt) {
    std::vector<ThreadReplyPair> pairs;
    std::optional<Stance> stance;
    if (mapping && conv.gold_label) stance = (*mapping)(*conv.gold_label);
    for (const Reply& r : conv.replies) {
        if (!r.is_primary) continue;
        pairs.push_back({conv.thread.text_clean, r.post.text_clean, conv.thread.id, stance});
    }
    return pairs;
}

}  // namespace rumor::corpus
