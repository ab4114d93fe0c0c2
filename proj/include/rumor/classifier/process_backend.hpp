#pragma once
// Backend that delegates to a long-lived worker process over a JSON-lines
// protocol on its stdin/stdout. tools/transformer_worker.py implements the
// worker side with a pretrained transformer; any program speaking the
// protocol can stand in.
//
// Requests (one JSON object per line) and their replies:
//   {"op":"init","classes":K,"input":"single"|"pair","state":dir|null} -> {"ok":true}
//   {"op":"fit","recipe":{...},"examples":[{"text","pair","target"}]}   -> {"ok":true}
//   {"op":"predict","text":..,"pair":..|null}                           -> {"probs":[...]}
//   {"op":"save","state":dir}                                           -> {"ok":true}
// Any reply may instead be {"error":"message"}.

#include <fcntl.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <memory>
#include <mutex>
#include <string>

#include "json.hpp"
#include "rumor/classifier/backend.hpp"

namespace rumor::classifier {

// Bidirectional pipe to `/bin/sh -c command`.
class WorkerProcess {
public:
    explicit WorkerProcess(const std::string& command) {
        int to_child[2];
        int from_child[2];
        if (::pipe2(to_child, O_CLOEXEC) != 0) throw ModelFormatError("pipe failed: " + std::string(std::strerror(errno)));
        if (::pipe2(from_child, O_CLOEXEC) != 0) {
            ::close(to_child[0]);
            ::close(to_child[1]);
            throw ModelFormatError("pipe failed: " + std::string(std::strerror(errno)));
        }
        pid_ = ::fork();
        if (pid_ < 0) throw ModelFormatError("fork failed: " + std::string(std::strerror(errno)));
        if (pid_ == 0) {
            ::dup2(to_child[0], STDIN_FILENO);
            ::dup2(from_child[1], STDOUT_FILENO);
            ::close(to_child[0]);
            ::close(to_child[1]);
            ::close(from_child[0]);
            ::close(from_child[1]);
            ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
            ::_exit(127);
        }
        ::close(to_child[0]);
        ::close(from_child[1]);
        to_ = ::fdopen(to_child[1], "w");
        from_ = ::fdopen(from_child[0], "r");
        if (!to_ || !from_) throw ModelFormatError("fdopen failed");
        ::signal(SIGPIPE, SIG_IGN);
    }

    WorkerProcess(const WorkerProcess&) = delete;
    WorkerProcess& operator=(const WorkerProcess&) = delete;

    ~WorkerProcess() {
        if (to_) std::fclose(to_);
        if (from_) std::fclose(from_);
        if (pid_ > 0) {
            int status = 0;
            ::waitpid(pid_, &status, 0);
        }
    }

    nlohmann::json call(const nlohmann::json& request) {
        const std::string line = request.dump() + "\n";
        if (std::fwrite(line.data(), 1, line.size(), to_) != line.size() || std::fflush(to_) != 0)
            throw ModelFormatError("worker process closed its input");
        std::string reply;
        int c = 0;
        while ((c = std::fgetc(from_)) != EOF && c != '\n') reply.push_back(static_cast<char>(c));
        if (reply.empty() && c == EOF) throw ModelFormatError("worker process exited without replying");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(reply);
        } catch (const nlohmann::json::exception&) {
            throw ModelFormatError("worker sent invalid JSON: " + reply.substr(0, 200));
        }
        if (j.contains("error")) throw ModelFormatError("worker error: " + j["error"].dump());
        return j;
    }

private:
    pid_t pid_ = -1;
    std::FILE* to_ = nullptr;
    std::FILE* from_ = nullptr;
};

class ProcessBackend final : public ClassifierBackend {
public:
    static constexpr std::string_view kKind = "transformer";

    ProcessBackend(std::string command, std::size_t classes, InputKind input,
                   std::optional<std::filesystem::path> state_dir = std::nullopt)
        : command_(std::move(command)), classes_(classes), input_(input), trained_(state_dir.has_value()) {
        worker_ = std::make_unique<WorkerProcess>(command_);
        worker_->call({{"op", "init"},
                       {"classes", classes_},
                       {"input", to_string(input_)},
                       {"state", state_dir ? nlohmann::json(state_dir->string()) : nlohmann::json(nullptr)}});
    }

    std::string_view kind() const override { return kKind; }
    std::size_t num_classes() const override { return classes_; }
    InputKind input_kind() const override { return input_; }
    bool trained() const override { return trained_; }
    const std::string& command() const { return command_; }

    void fit(std::span<const TrainingExample> examples, const TrainingRecipe& recipe) override {
        recipe.validate();
        check_targets(examples, classes_);
        nlohmann::json batch = nlohmann::json::array();
        for (const auto& ex : examples)
            batch.push_back({{"text", ex.input.text},
                             {"pair", ex.input.pair_text ? nlohmann::json(*ex.input.pair_text) : nlohmann::json(nullptr)},
                             {"target", ex.target}});
        std::lock_guard lock(mutex_);
        worker_->call({{"op", "fit"},
                       {"recipe",
                        {{"epochs", recipe.epochs},
                         {"batch_size", recipe.batch_size},
                         {"learning_rate", recipe.learning_rate},
                         {"label_smoothing", recipe.label_smoothing},
                         {"optimizer", recipe.optimizer}}},
                       {"examples", std::move(batch)}});
        trained_ = true;
    }

    std::vector<double> predict(const ClassifierInput& input) const override {
        if (!trained_) throw UntrainedBackend("transformer backend has not been trained");
        nlohmann::json reply;
        {
            std::lock_guard lock(mutex_);
            reply = worker_->call(
                {{"op", "predict"},
                 {"text", input.text},
                 {"pair", input.pair_text ? nlohmann::json(*input.pair_text) : nlohmann::json(nullptr)}});
        }
        auto probs = reply.at("probs").get<std::vector<double>>();
        if (probs.size() != classes_) throw ModelFormatError("worker returned wrong number of classes");
        return probs;
    }

    // Weights live in <model_path>.state/; the payload records where.
    std::string serialize_payload(const std::filesystem::path& model_path) const override {
        std::filesystem::path state = model_path;
        state += ".state";
        {
            std::lock_guard lock(mutex_);
            worker_->call({{"op", "save"}, {"state", state.string()}});
        }
        return nlohmann::json{{"command", command_}, {"state", state.filename().string()}}.dump();
    }

    static std::unique_ptr<ProcessBackend> deserialize(std::string_view payload, std::size_t classes, InputKind input,
                                      const std::filesystem::path& model_path,
                                      const std::optional<std::string>& command_override) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(payload);
        } catch (const nlohmann::json::exception&) {
            throw ModelFormatError("transformer payload is not JSON");
        }
        const std::string command = command_override ? *command_override : j.at("command").get<std::string>();
        return std::make_unique<ProcessBackend>(command, classes, input,
                                                model_path.parent_path() / j.at("state").get<std::string>());
    }

private:
    std::string command_;
    std::size_t classes_;
    InputKind input_;
    bool trained_;
    std::unique_ptr<WorkerProcess> worker_;
    mutable std::mutex mutex_;
};

}  // namespace rumor::classifier
