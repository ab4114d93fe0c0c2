#pragma once
// Sequence-classification backend contract. Channels talk to classifiers
// only through this interface; the reference bag-of-words model and the
// external transformer worker both implement it.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rumor/core/errors.hpp"
#include "rumor/core/prob_vector.hpp"

namespace rumor::classifier {

enum class InputKind { Single, Pair };

inline std::string_view to_string(InputKind k) { return k == InputKind::Single ? "single" : "pair"; }

inline std::optional<InputKind> parse_input_kind(std::string_view s) {
    if (s == "single") return InputKind::Single;
    if (s == "pair") return InputKind::Pair;
    return std::nullopt;
}

// A single text, or a (text, pair_text) sentence pair such as (thread, reply).
struct ClassifierInput {
    std::string text;
    std::optional<std::string> pair_text;

    static ClassifierInput single(std::string t) { return {std::move(t), std::nullopt}; }
    static ClassifierInput pair(std::string a, std::string b) { return {std::move(a), std::move(b)}; }
};

struct TrainingExample {
    ClassifierInput input;
    std::vector<double> target;  // distribution over the backend's classes, usually one-hot
};

struct TrainingRecipe {
    int epochs = 5;
    int batch_size = 32;
    double learning_rate = 5e-5;
    double label_smoothing = 0.0;
    std::string optimizer = "adam";  // provenance only for the reference backend

    void validate() const {
        if (epochs <= 0) throw UsageError("recipe: epochs must be positive");
        if (batch_size <= 0) throw UsageError("recipe: batch_size must be positive");
        if (!(learning_rate > 0.0)) throw UsageError("recipe: learning_rate must be positive");
        if (!(label_smoothing >= 0.0 && label_smoothing < 1.0))
            throw UsageError("recipe: label_smoothing must lie in [0,1)");
    }

    friend bool operator==(const TrainingRecipe&, const TrainingRecipe&) = default;
};

class ClassifierBackend {
public:
    virtual ~ClassifierBackend() = default;

    virtual std::string_view kind() const = 0;
    virtual std::size_t num_classes() const = 0;
    virtual InputKind input_kind() const = 0;
    virtual bool trained() const = 0;

    // Continues from the current state, so pretrain-then-finetune is two calls.
    // Targets are smoothed with recipe.label_smoothing inside the backend.
    // Not safe to run concurrently with anything else on the same instance.
    virtual void fit(std::span<const TrainingExample> examples, const TrainingRecipe& recipe) = 0;

    // Deterministic for a fixed state; safe for concurrent callers after fit.
    virtual std::vector<double> predict(const ClassifierInput& input) const = 0;

    // Opaque payload for the model file. model_path lets backends that keep
    // state outside the file place it next to the model.
    virtual std::string serialize_payload(const std::filesystem::path& model_path) const = 0;
};

inline void check_targets(std::span<const TrainingExample> examples, std::size_t classes) {
    for (const auto& ex : examples) {
        if (ex.target.size() != classes)
            throw UsageError("training target has " + std::to_string(ex.target.size()) +
                             " classes, backend expects " + std::to_string(classes));
        double total = 0.0;
        for (double v : ex.target) {
            if (!(v >= 0.0 && v <= 1.0)) throw UsageError("training target outside [0,1]");
            total += v;
        }
        if (std::abs(total - 1.0) > kProbSumTolerance) throw UsageError("training target does not sum to 1");
    }
}

template <std::size_t K>
std::vector<double> one_hot_target(std::size_t index) {
    const auto p = ProbVector<K>::one_hot(index);
    return {p.values().begin(), p.values().end()};
}

// Checked typed prediction; throws UntrainedBackend before touching state.
template <std::size_t K>
ProbVector<K> predict_probs(const ClassifierBackend& backend, const ClassifierInput& input) {
    if (!backend.trained()) throw UntrainedBackend(std::string(backend.kind()) + " backend has not been trained");
    if (backend.num_classes() != K)
        throw ModelFormatError("backend has " + std::to_string(backend.num_classes()) + " classes, expected " +
                               std::to_string(K));
    const auto raw = backend.predict(input);
    return ProbVector<K>::from(raw);
}

}  // namespace rumor::classifier
