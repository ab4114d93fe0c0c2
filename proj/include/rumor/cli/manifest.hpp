#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "json.hpp"
#include "rumor/classifier/reference_backend.hpp"
#include "rumor/corpus/timestamp.hpp"

namespace rumor::cli {

inline constexpr const char* kToolVersion = "1.0.0";

// "fnv1a64:<hex>" over the file bytes, or "missing".
inline std::string file_checksum(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "missing";
    std::uint64_t h = 14695981039346656037ull;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        h = classifier::fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
    }
    char out[32];
    std::snprintf(out, sizeof out, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return out;
}

inline std::string now_utc() {
    return corpus::format_timestamp(
        std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()));
}

// Everything needed to re-run a reported number: the resolved config, and
// checksums of every input corpus and model file involved.
struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string command;
    std::map<std::string, std::string> config;
    std::map<std::string, std::string> corpus_checksums;
    std::map<std::string, std::string> backend_checksums;
    std::string started_at;
    std::string finished_at;
    nlohmann::ordered_json details = nlohmann::ordered_json::object();

    void add_corpus(const std::filesystem::path& p) {
        if (!p.empty()) corpus_checksums[p.string()] = file_checksum(p);
    }
    void add_backend(const std::filesystem::path& p) {
        if (!p.empty()) backend_checksums[p.string()] = file_checksum(p);
    }

    nlohmann::ordered_json json() const {
        return {{"tool_version", tool_version},
                {"command", command},
                {"config", config},
                {"corpus_checksums", corpus_checksums},
                {"backend_checksums", backend_checksums},
                {"started_at", started_at},
                {"finished_at", finished_at},
                {"details", details}};
    }

    void save(const std::filesystem::path& path) const {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        out << json().dump(2) << '\n';
    }
};

inline std::filesystem::path manifest_path_for(const std::filesystem::path& artifact) {
    std::filesystem::path p = artifact;
    p += ".manifest.json";
    return p;
}

}  // namespace rumor::cli
