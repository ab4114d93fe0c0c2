#pragma once
// Loader for the SemEval-2019 Task 7 (RumourEval) conversation layout:
//
//   <thread_dir>/source-tweet/<id>.json
//   <thread_dir>/replies/<id>.json      (zero or more)
//   <thread_dir>/structure.json         nested {id: {child_id: {...}, leaf_id: []}}
//
// Twitter posts carry `id_str` / `text` / `created_at`; Reddit posts wrap a
// `data` object (optionally a Listing with `children`) carrying `id`,
// `title`/`selftext` or `body`, and `created_utc` / `created`.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "rumor/core/errors.hpp"
#include "rumor/corpus/conversation.hpp"

namespace rumor::corpus {

namespace fs = std::filesystem;

struct LoadOptions {
    // Structure entries without a reply file (deleted posts) are dropped with
    // their subtree instead of failing the load.
    bool drop_missing_replies = false;
};

using LabelKey = std::map<std::string, Veracity>;

namespace detail {

inline nlohmann::json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw CorpusFormatError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw CorpusFormatError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

inline std::string json_id(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    return {};
}

inline Timestamp json_timestamp(const nlohmann::json& v, const fs::path& path) {
    try {
        if (v.is_number()) return from_epoch_seconds(v.get<double>());
        if (v.is_string()) return parse_timestamp(v.get<std::string>());
    } catch (const UnparseableTimestamp& e) {
        throw UnparseableTimestamp(std::string(e.what()) + " in " + path.string());
    }
    throw UnparseableTimestamp("missing or non-scalar timestamp in " + path.string());
}

inline Post parse_twitter_post(const nlohmann::json& j, const fs::path& path) {
    std::string id;
    if (auto it = j.find("id_str"); it != j.end()) id = json_id(*it);
    if (id.empty())
        if (auto it = j.find("id"); it != j.end()) id = json_id(*it);
    if (id.empty()) id = path.stem().string();

    std::string text;
    if (auto it = j.find("full_text"); it != j.end() && it->is_string()) text = it->get<std::string>();
    else if (auto it2 = j.find("text"); it2 != j.end() && it2->is_string()) text = it2->get<std::string>();

    auto ts = j.find("created_at");
    if (ts == j.end()) throw UnparseableTimestamp("missing created_at in " + path.string());
    return make_post(std::move(id), std::move(text), json_timestamp(*ts, path), Platform::Twitter);
}

inline Post parse_reddit_post(const nlohmann::json& j, const fs::path& path) {
    const nlohmann::json* d = &j.at("data");
    if (auto ch = d->find("children"); ch != d->end() && ch->is_array()) {
        if (ch->empty()) throw CorpusFormatError("empty Reddit listing in " + path.string());
        d = &ch->front().at("data");
    }
    std::string id = d->contains("id") ? json_id(d->at("id")) : std::string{};
    if (id.empty()) id = path.stem().string();

    std::string text;
    auto str = [&](const char* key) -> std::string {
        auto it = d->find(key);
        return it != d->end() && it->is_string() ? it->get<std::string>() : std::string{};
    };
    if (d->contains("title")) {
        text = str("title");
        if (std::string body = str("selftext"); !body.empty()) text += "\n" + body;
    } else {
        text = str("body");
    }

    const nlohmann::json* ts = nullptr;
    if (auto it = d->find("created_utc"); it != d->end() && !it->is_null()) ts = &*it;
    else if (auto it2 = d->find("created"); it2 != d->end() && !it2->is_null()) ts = &*it2;
    if (!ts) throw UnparseableTimestamp("missing created_utc/created in " + path.string());
    return make_post(std::move(id), std::move(text), json_timestamp(*ts, path), Platform::Reddit);
}

inline Post parse_post_file(const fs::path& path) {
    const nlohmann::json j = read_json_file(path);
    if (!j.is_object()) throw CorpusFormatError("post file is not an object: " + path.string());
    try {
        if (j.contains("data")) return parse_reddit_post(j, path);
        return parse_twitter_post(j, path);
    } catch (const nlohmann::json::exception& e) {
        throw CorpusFormatError("unexpected post layout in " + path.string() + ": " + e.what());
    }
}

inline std::vector<fs::path> json_files(const fs::path& dir) {
    std::vector<fs::path> files;
    if (!fs::is_directory(dir)) return files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

struct StructureNode {
    std::string id;
    std::string parent_id;
    bool skipped = false;  // missing reply file, lenient mode
};

}  // namespace detail

inline Conversation load_conversation(const fs::path& dir, const LoadOptions& options = {}) {
    const auto sources = detail::json_files(dir / "source-tweet");
    if (sources.empty()) throw MalformedStructure("missing source post in " + dir.string());
    if (sources.size() > 1) throw MalformedStructure("more than one source post in " + dir.string());

    Conversation conv;
    conv.thread = detail::parse_post_file(sources.front());

    const fs::path structure_path = dir / "structure.json";
    if (!fs::exists(structure_path)) throw MalformedStructure("missing " + structure_path.string());
    nlohmann::json structure;
    try {
        structure = detail::read_json_file(structure_path);
    } catch (const CorpusFormatError& e) {
        throw MalformedStructure(e.what());
    }
    if (!structure.is_object() || !structure.contains(conv.thread.id))
        throw MalformedStructure(structure_path.string() + ": root does not name source post '" +
                                 conv.thread.id + "'");

    std::unordered_map<std::string, Post> reply_posts;
    for (const auto& file : detail::json_files(dir / "replies")) {
        Post p = detail::parse_post_file(file);
        reply_posts.emplace(p.id, std::move(p));
    }

    std::vector<detail::StructureNode> nodes;
    std::set<std::string> seen{conv.thread.id};
    auto walk = [&](const nlohmann::json& node, const std::string& parent, bool skip, auto& self) -> void {
        if (!node.is_object()) return;  // [] / null / scalar leaves
        for (const auto& [id, children] : node.items()) {
            if (!seen.insert(id).second)
                throw MalformedStructure(structure_path.string() + ": id '" + id +
                                         "' appears twice (cycle or duplicate)");
            bool missing = !reply_posts.contains(id);
            if (missing && !skip && !options.drop_missing_replies)
                throw MalformedStructure(structure_path.string() + ": reply '" + id +
                                         "' has no reply file");
            const bool drop = skip || missing;
            nodes.push_back({id, parent, drop});
            self(children, id, drop, self);
        }
    };
    walk(structure.at(conv.thread.id), conv.thread.id, false, walk);

    for (const auto& node : nodes) {
        if (node.skipped) continue;
        Reply r;
        r.post = reply_posts.at(node.id);
        r.parent_id = node.parent_id;
        r.is_primary = node.parent_id == conv.thread.id;
        conv.replies.push_back(std::move(r));
    }
    sort_replies(conv.replies);
    validate(conv);
    return conv;
}

// Accepts the task key file ({"subtaskbenglish": {id: label}, ...}) or a flat
// {id: label} object.
inline LabelKey load_label_key(const fs::path& path) {
    const nlohmann::json j = detail::read_json_file(path);
    const nlohmann::json* table = &j;
    if (auto it = j.find("subtaskbenglish"); it != j.end()) table = &*it;
    if (!table->is_object()) throw CorpusFormatError("label key is not an object: " + path.string());
    LabelKey key;
    for (const auto& [id, label] : table->items()) {
        if (!label.is_string())
            throw CorpusFormatError("non-string label for '" + id + "' in " + path.string());
        key[id] = require_label<Veracity>(label.get<std::string>(), parse_veracity, "veracity");
    }
    return key;
}

// Every directory under root holding a structure.json and a source-tweet/
// folder, sorted by path.
inline std::vector<fs::path> find_conversation_dirs(const fs::path& root) {
    std::vector<fs::path> dirs;
    if (!fs::is_directory(root)) throw CorpusFormatError("not a directory: " + root.string());
    if (fs::exists(root / "structure.json") && fs::is_directory(root / "source-tweet")) {
        dirs.push_back(root);
        return dirs;
    }
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        const auto& p = entry.path();
        if (fs::exists(p / "structure.json") && fs::is_directory(p / "source-tweet")) dirs.push_back(p);
    }
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

// Loads every conversation under root, attaches gold labels from the key
// and returns them sorted by thread id.
inline std::vector<Conversation> load_split(const fs::path& root, const LoadOptions& options = {},
                                            const LabelKey* labels = nullptr) {
    std::vector<Conversation> convs;
    std::set<std::string> ids;
    for (const auto& dir : find_conversation_dirs(root)) {
        Conversation c = load_conversation(dir, options);
        if (!ids.insert(c.thread.id).second)
            throw MalformedStructure("thread id '" + c.thread.id + "' appears twice under " + root.string());
        if (labels) {
            if (auto it = labels->find(c.thread.id); it != labels->end()) c.gold_label = it->second;
        }
        convs.push_back(std::move(c));
    }
    std::sort(convs.begin(), convs.end(),
              [](const Conversation& a, const Conversation& b) { return a.thread.id < b.thread.id; });
    return convs;
}

}  // namespace rumor::corpus
