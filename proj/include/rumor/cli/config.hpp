#pragma once
// Flat `key = value` configuration. Lines starting with '#' are comments.
// CLI flags override file values through FlatConfig::set.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rumor/evaluation/evaluation.hpp"
#include "rumor/pipeline/ablation.hpp"

namespace rumor::cli {

class FlatConfig {
public:
    static FlatConfig parse(std::istream& in, const std::string& source = "<config>") {
        FlatConfig c;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = corpus::detail::trim(line);
            if (t.empty() || t[0] == '#') continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw UsageError(source + ":" + std::to_string(lineno) + ": expected key = value");
            const std::string key = corpus::detail::trim(t.substr(0, eq));
            if (key.empty()) throw UsageError(source + ":" + std::to_string(lineno) + ": empty key");
            c.values_[key] = corpus::detail::trim(t.substr(eq + 1));
        }
        return c;
    }

    static FlatConfig load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw UsageError("cannot open config " + path.string());
        return parse(in, path.string());
    }

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    bool has(const std::string& key) const { return values_.contains(key) && !values_.at(key).empty(); }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::string get(const std::string& key, const std::string& fallback = {}) const {
        auto it = values_.find(key);
        return it == values_.end() || it->second.empty() ? fallback : it->second;
    }

    template <typename T>
    T number(const std::string& key, T fallback) const {
        if (!has(key)) return fallback;
        const std::string& text = values_.at(key);
        std::istringstream in(text);
        T v{};
        in >> v;
        if (!in || !in.eof()) throw UsageError("config key '" + key + "': bad number '" + text + "'");
        return v;
    }

    bool flag(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const std::string v = values_.at(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw UsageError("config key '" + key + "': expected true/false, got '" + v + "'");
    }

private:
    std::map<std::string, std::string> values_;
};

inline std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = corpus::detail::trim(item);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size() || v <= 0) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw UsageError(what + ": expected positive integers, got '" + item + "'");
        }
    }
    return out;
}

// Directory for default model/manifest locations: $RUMOR_CACHE_DIR or ./.rumor-cache
inline std::filesystem::path cache_dir() {
    if (const char* env = std::getenv("RUMOR_CACHE_DIR"); env && *env) return env;
    return ".rumor-cache";
}

struct Settings {
    TrainingPlan plan;
    PipelineConfig pipeline;
    evaluation::Averaging averaging = evaluation::Averaging::Macro;
    std::vector<int> windows;  // ablation reply windows

    std::filesystem::path train_corpus;
    std::filesystem::path test_corpus;
    std::filesystem::path hedge_corpus;
    std::filesystem::path deception_corpus;
    std::filesystem::path agreement_corpus;
    std::filesystem::path lie_all_model;
};

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = [] {
        std::set<std::string> k{"seed",
                                "backend",
                                "epsilon",
                                "window_days",
                                "mode",
                                "jobs",
                                "average",
                                "lie_on_all",
                                "train_corpus",
                                "test_corpus",
                                "hedge_corpus",
                                "deception_corpus",
                                "agreement_corpus",
                                "certainty_model",
                                "lie_model",
                                "lie_all_model",
                                "stance_model",
                                "phase1.per_class",
                                "stance.unverified",
                                "reference.dims",
                                "reference.lr_scale",
                                "reference.init_scale",
                                "transformer.command",
                                "ablate.windows"};
        for (const char* phase : {"phase1", "phase21", "phase22"})
            for (const char* step : {"pretrain", "finetune"})
                for (const char* field : {"epochs", "batch_size", "learning_rate", "label_smoothing", "optimizer"})
                    k.insert(std::string(phase) + "." + step + "." + field);
        return k;
    }();
    return keys;
}

inline classifier::TrainingRecipe read_recipe(const FlatConfig& c, const std::string& prefix,
                                              classifier::TrainingRecipe r) {
    r.epochs = c.number<int>(prefix + ".epochs", r.epochs);
    r.batch_size = c.number<int>(prefix + ".batch_size", r.batch_size);
    r.learning_rate = c.number<double>(prefix + ".learning_rate", r.learning_rate);
    r.label_smoothing = c.number<double>(prefix + ".label_smoothing", r.label_smoothing);
    r.optimizer = c.get(prefix + ".optimizer", r.optimizer);
    r.validate();
    return r;
}

inline Settings settings_from(const FlatConfig& c) {
    for (const auto& [key, value] : c.values())
        if (!known_keys().contains(key)) throw UsageError("unknown config key '" + key + "'");

    Settings s;
    const auto seed = c.number<std::uint64_t>("seed", 0);
    s.plan.seed = seed;
    s.pipeline.seed = seed;

    s.plan.backend.kind = c.get("backend", "reference");
    if (s.plan.backend.kind != "reference" && s.plan.backend.kind != "transformer")
        throw UsageError("backend must be reference or transformer");
    s.plan.backend.reference.dims = c.number<std::size_t>("reference.dims", s.plan.backend.reference.dims);
    s.plan.backend.reference.lr_scale = c.number<double>("reference.lr_scale", s.plan.backend.reference.lr_scale);
    s.plan.backend.reference.init_scale = c.number<double>("reference.init_scale", s.plan.backend.reference.init_scale);
    s.plan.backend.transformer_command = c.get("transformer.command", s.plan.backend.transformer_command);

    s.plan.phase1.pretrain = read_recipe(c, "phase1.pretrain", s.plan.phase1.pretrain);
    s.plan.phase1.finetune = read_recipe(c, "phase1.finetune", s.plan.phase1.finetune);
    s.plan.phase1.per_class = c.number<std::size_t>("phase1.per_class", s.plan.phase1.per_class);
    s.plan.phase21.pretrain = read_recipe(c, "phase21.pretrain", s.plan.phase21.pretrain);
    s.plan.phase21.finetune = read_recipe(c, "phase21.finetune", s.plan.phase21.finetune);
    s.plan.phase22.pretrain = read_recipe(c, "phase22.pretrain", s.plan.phase22.pretrain);
    s.plan.phase22.finetune = read_recipe(c, "phase22.finetune", s.plan.phase22.finetune);

    const std::string unverified = c.get("stance.unverified", "none");
    if (unverified != "none" && unverified != "skip") throw UsageError("stance.unverified must be none or skip");
    s.plan.stance_mapping.skip_unverified = unverified == "skip";

    s.pipeline.entropy_epsilon = c.number<double>("epsilon", kDefaultEntropyEpsilon);
    if (c.has("window_days")) {
        const auto days = parse_int_list(c.get("window_days"), "window_days");
        if (days.size() != 1) throw UsageError("window_days takes a single value");
        s.pipeline.reply_window_days = days.front();
    }
    if (c.has("mode")) {
        const auto mode = parse_mode(c.get("mode"));
        if (!mode) throw UsageError("unknown mode '" + c.get("mode") + "'");
        s.pipeline.mode = *mode;
    }
    s.pipeline.jobs = c.number<unsigned>("jobs", 1);
    s.pipeline.lie_on_all = c.flag("lie_on_all", false);
    s.pipeline.validate();

    const std::string avg = c.get("average", "macro");
    if (avg != "macro" && avg != "micro") throw UsageError("average must be macro or micro");
    s.averaging = avg == "macro" ? evaluation::Averaging::Macro : evaluation::Averaging::Micro;
    s.windows = parse_int_list(c.get("ablate.windows", "1,3,5"), "ablate.windows");

    s.train_corpus = c.get("train_corpus");
    s.test_corpus = c.get("test_corpus");
    s.hedge_corpus = c.get("hedge_corpus");
    s.deception_corpus = c.get("deception_corpus");
    s.agreement_corpus = c.get("agreement_corpus");

    const auto cache = cache_dir();
    s.pipeline.certainty_model = c.get("certainty_model", (cache / "certainty.model").string());
    s.pipeline.lie_model = c.get("lie_model", (cache / "lie.model").string());
    s.lie_all_model = c.get("lie_all_model", (cache / "lie_all.model").string());
    s.pipeline.stance_model = c.get("stance_model", (cache / "stance.model").string());
    return s;
}

}  // namespace rumor::cli
