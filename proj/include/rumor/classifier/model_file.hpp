#pragma once
// Self-describing model file:
//
//   rumor-model 1\n
//   kind <reference|transformer>\n
//   classes <K>\n
//   input <single|pair>\n
//   payload <bytes>\n
//   \n
//   <opaque payload>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "rumor/classifier/process_backend.hpp"
#include "rumor/classifier/reference_backend.hpp"

namespace rumor::classifier {

inline constexpr int kModelFormatVersion = 1;

struct BackendSettings {
    std::string kind = "reference";
    ReferenceOptions reference;
    std::string transformer_command = "python3 tools/transformer_worker.py";
};

inline std::unique_ptr<ClassifierBackend> make_backend(const BackendSettings& settings, std::size_t classes,
                                                       InputKind input) {
    if (settings.kind == ReferenceBackend::kKind)
        return std::make_unique<ReferenceBackend>(classes, input, settings.reference);
    if (settings.kind == ProcessBackend::kKind)
        return std::make_unique<ProcessBackend>(settings.transformer_command, classes, input);
    throw UsageError("unknown backend '" + settings.kind + "' (expected reference or transformer)");
}

inline std::string encode_model(const ClassifierBackend& backend, const std::filesystem::path& path) {
    const std::string payload = backend.serialize_payload(path);
    std::ostringstream out;
    out << "rumor-model " << kModelFormatVersion << '\n'
        << "kind " << backend.kind() << '\n'
        << "classes " << backend.num_classes() << '\n'
        << "input " << to_string(backend.input_kind()) << '\n'
        << "payload " << payload.size() << "\n\n";
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    return out.str();
}

inline void save_model(const ClassifierBackend& backend, const std::filesystem::path& path) {
    if (!backend.trained()) throw UntrainedBackend("refusing to save an untrained backend to " + path.string());
    const std::string bytes = encode_model(backend, path);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelFormatError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

struct ModelHeader {
    int version = 0;
    std::string kind;
    std::size_t classes = 0;
    InputKind input = InputKind::Single;
    std::size_t payload_size = 0;
};

inline std::pair<ModelHeader, std::string> decode_model(const std::string& bytes, const std::string& source) {
    ModelHeader h;
    std::size_t pos = 0;
    auto line = [&]() -> std::string {
        const auto nl = bytes.find('\n', pos);
        if (nl == std::string::npos) throw ModelFormatError(source + ": truncated header");
        std::string l = bytes.substr(pos, nl - pos);
        pos = nl + 1;
        return l;
    };
    auto field = [&](const std::string& name) {
        const std::string l = line();
        if (l.rfind(name + " ", 0) != 0) throw ModelFormatError(source + ": expected '" + name + "' header");
        return l.substr(name.size() + 1);
    };
    try {
        h.version = std::stoi(field("rumor-model"));
        if (h.version != kModelFormatVersion)
            throw ModelFormatError(source + ": unsupported model format version " + std::to_string(h.version));
        h.kind = field("kind");
        h.classes = std::stoul(field("classes"));
        const std::string input = field("input");
        const auto kind = parse_input_kind(input);
        if (!kind) throw ModelFormatError(source + ": bad input kind '" + input + "'");
        h.input = *kind;
        h.payload_size = std::stoul(field("payload"));
    } catch (const std::logic_error&) {
        throw ModelFormatError(source + ": malformed header");
    }
    if (!line().empty()) throw ModelFormatError(source + ": missing blank line after header");
    if (bytes.size() - pos != h.payload_size) throw ModelFormatError(source + ": payload size mismatch");
    return {h, bytes.substr(pos)};
}

inline std::unique_ptr<ClassifierBackend> load_model(const std::filesystem::path& path,
                                                     const BackendSettings& settings = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UntrainedBackend("no trained model at " + path.string());
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    auto [header, payload] = decode_model(bytes, path.string());
    std::unique_ptr<ClassifierBackend> backend;
    if (header.kind == ReferenceBackend::kKind) {
        backend = std::make_unique<ReferenceBackend>(ReferenceBackend::deserialize(payload));
    } else if (header.kind == ProcessBackend::kKind) {
        std::optional<std::string> cmd;
        if (settings.kind == ProcessBackend::kKind) cmd = settings.transformer_command;
        backend = ProcessBackend::deserialize(payload, header.classes, header.input, path, cmd);
    } else {
        throw ModelFormatError(path.string() + ": unknown backend kind '" + header.kind + "'");
    }
    if (backend->num_classes() != header.classes || backend->input_kind() != header.input)
        throw ModelFormatError(path.string() + ": header disagrees with payload");
    return backend;
}

}  // namespace rumor::classifier
