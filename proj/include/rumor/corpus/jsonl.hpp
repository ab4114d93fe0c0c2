#pragma once
// Canonical intermediate format: one Conversation per line.
//
//   {"thread": {"id", "text_raw", "text_clean", "created_at", "platform"},
//    "replies": [{"post": {...}, "parent_id", "is_primary"}, ...],
//    "gold_label": "true" | "false" | "unverified" | null}

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rumor/corpus/conversation.hpp"

namespace rumor::corpus {

using ojson = nlohmann::ordered_json;

inline ojson to_json(const Post& p) {
    return ojson{{"id", p.id},
                 {"text_raw", p.text_raw},
                 {"text_clean", p.text_clean},
                 {"created_at", format_timestamp(p.created_at)},
                 {"platform", to_string(p.platform)}};
}

inline ojson to_json(const Conversation& c) {
    ojson replies = ojson::array();
    for (const Reply& r : c.replies)
        replies.push_back(ojson{{"post", to_json(r.post)}, {"parent_id", r.parent_id}, {"is_primary", r.is_primary}});
    ojson j{{"thread", to_json(c.thread)}, {"replies", std::move(replies)}};
    j["gold_label"] = c.gold_label ? ojson(std::string(to_string(*c.gold_label))) : ojson(nullptr);
    return j;
}

inline Post post_from_json(const ojson& j) {
    Post p;
    p.id = j.at("id").get<std::string>();
    p.text_raw = j.at("text_raw").get<std::string>();
    p.text_clean = j.contains("text_clean") ? j.at("text_clean").get<std::string>() : clean_text(p.text_raw);
    p.created_at = parse_timestamp(j.at("created_at").get<std::string>());
    p.platform = require_label<Platform>(j.at("platform").get<std::string>(), parse_platform, "platform");
    return p;
}

// Validates the tree invariants of the decoded value.
inline Conversation conversation_from_json(const ojson& j) {
    Conversation c;
    try {
        c.thread = post_from_json(j.at("thread"));
        for (const auto& r : j.at("replies")) {
            Reply reply;
            reply.post = post_from_json(r.at("post"));
            reply.parent_id = r.at("parent_id").get<std::string>();
            reply.is_primary = r.at("is_primary").get<bool>();
            c.replies.push_back(std::move(reply));
        }
        if (auto it = j.find("gold_label"); it != j.end() && !it->is_null())
            c.gold_label = require_label<Veracity>(it->get<std::string>(), parse_veracity, "veracity");
    } catch (const nlohmann::json::exception& e) {
        throw CorpusFormatError(std::string("bad conversation record: ") + e.what());
    }
    validate(c);
    return c;
}

inline void write_jsonl(std::ostream& out, const std::vector<Conversation>& convs) {
    for (const auto& c : convs) out << to_json(c).dump() << '\n';
}

inline std::vector<Conversation> read_jsonl(std::istream& in) {
    std::vector<Conversation> convs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ojson j;
        try {
            j = ojson::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw CorpusFormatError("line " + std::to_string(lineno) + ": " + e.what());
        }
        convs.push_back(conversation_from_json(j));
    }
    return convs;
}

inline void save_conversations(const std::filesystem::path& path, const std::vector<Conversation>& convs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CorpusFormatError("cannot write " + path.string());
    write_jsonl(out, convs);
}

inline std::vector<Conversation> load_conversations(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorpusFormatError("cannot open " + path.string());
    return read_jsonl(in);
}

}  // namespace rumor::corpus
