#pragma once
// Double-channel routing and the ablation modes:
//
//   double            certain -> lie detector,       uncertain -> agreement
//   inverse           certain -> agreement,          uncertain -> lie detector
//   single_lie        Phase 1 skipped, every thread -> lie detector
//   single_agreement  Phase 1 skipped, every thread -> agreement
//
// Reply windows restrict the replies the agreement channel sees.

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "rumor/channels/agreement.hpp"
#include "rumor/channels/certainty.hpp"
#include "rumor/channels/lie.hpp"
#include "rumor/pipeline/prediction.hpp"

namespace rumor {

enum class Mode { Double, SingleLie, SingleAgreement, Inverse };

inline constexpr std::array<Mode, 4> kAllModes{Mode::Double, Mode::SingleLie, Mode::SingleAgreement, Mode::Inverse};

inline std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::Double: return "double";
        case Mode::SingleLie: return "single_lie";
        case Mode::SingleAgreement: return "single_agreement";
        case Mode::Inverse: return "inverse";
    }
    return "?";
}

inline std::optional<Mode> parse_mode(std::string_view s) {
    for (Mode m : kAllModes)
        if (to_string(m) == s) return m;
    return std::nullopt;
}

inline bool uses_phase1(Mode m) { return m == Mode::Double || m == Mode::Inverse; }

struct PipelineConfig {
    Mode mode = Mode::Double;
    double entropy_epsilon = kDefaultEntropyEpsilon;
    std::optional<int> reply_window_days;
    std::uint64_t seed = 0;
    std::filesystem::path certainty_model;
    std::filesystem::path lie_model;
    std::filesystem::path stance_model;
    bool lie_on_all = false;  // also run the lie detector on threads routed elsewhere
    unsigned jobs = 1;

    void validate() const {
        if (!(entropy_epsilon >= 0.0)) throw UsageError("entropy epsilon must be >= 0");
        if (reply_window_days && *reply_window_days <= 0) throw UsageError("reply window must be a positive day count");
        if (jobs == 0) throw UsageError("jobs must be positive");
    }

    // Short row label for reports, e.g. "double" or "double@1d".
    std::string label() const {
        std::string s(to_string(mode));
        if (reply_window_days) s += "@" + std::to_string(*reply_window_days) + "d";
        return s;
    }
};

// Non-owning view of the trained classifiers a run needs.
struct Backends {
    const classifier::ClassifierBackend* certainty = nullptr;
    const classifier::ClassifierBackend* lie = nullptr;
    const classifier::ClassifierBackend* stance = nullptr;
};

inline Channel route(Mode mode, std::optional<Certainty> phase1) {
    switch (mode) {
        case Mode::SingleLie: return Channel::Lie;
        case Mode::SingleAgreement: return Channel::Agreement;
        case Mode::Double: return *phase1 == Certainty::Certain ? Channel::Lie : Channel::Agreement;
        case Mode::Inverse: return *phase1 == Certainty::Certain ? Channel::Agreement : Channel::Lie;
    }
    return Channel::Lie;
}

inline void require_backends(Mode mode, const Backends& b, bool lie_on_all = false) {
    auto need = [](const classifier::ClassifierBackend* p, const char* what) {
        if (!p) throw UntrainedBackend(std::string(what) + " backend is not loaded");
        if (!p->trained()) throw UntrainedBackend(std::string(what) + " backend has not been trained");
    };
    if (uses_phase1(mode)) need(b.certainty, "certainty (phase 1)");
    if (mode != Mode::SingleAgreement || lie_on_all) need(b.lie, "lie (phase 2-1)");
    if (mode != Mode::SingleLie) need(b.stance, "stance (phase 2-2)");
}

inline VeracityPrediction classify(const corpus::Conversation& conv, const PipelineConfig& config,
                                   const Backends& backends) {
    require_backends(config.mode, backends, config.lie_on_all);

    std::optional<channels::ChannelAssignment> assignment;
    if (uses_phase1(config.mode)) assignment = channels::classify_certainty(conv.thread, *backends.certainty);
    const Channel channel = route(config.mode, assignment ? std::optional(assignment->label) : std::nullopt);

    const corpus::Conversation windowed =
        config.reply_window_days ? corpus::filter_window(conv, *config.reply_window_days) : conv;

    VeracityPrediction p = channel == Channel::Lie
                               ? channels::classify_lie(conv.thread, *backends.lie, config.entropy_epsilon)
                               : channels::classify_agreement(windowed, *backends.stance, config.entropy_epsilon);
    p.assignment = assignment;
    p.n_primary_replies = windowed.primary_count();
    if (config.lie_on_all) p.lie_evidence = channels::lie_probs(conv.thread, *backends.lie);
    return p;
}

// One prediction per conversation in input order. With jobs > 1 the
// conversations fan out over worker threads; the first failing index (in
// input order among those attempted) is rethrown.
inline std::vector<VeracityPrediction> run_batch(std::span<const corpus::Conversation> convs,
                                                 const PipelineConfig& config, const Backends& backends) {
    config.validate();
    if (convs.empty()) return {};
    require_backends(config.mode, backends, config.lie_on_all);

    std::vector<std::optional<VeracityPrediction>> slots(convs.size());
    std::vector<std::exception_ptr> errors(convs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};

    auto work = [&] {
        for (std::size_t i = next++; i < convs.size() && !failed; i = next++) {
            try {
                slots[i] = classify(convs[i], config, backends);
            } catch (...) {
                errors[i] = std::current_exception();
                failed = true;
            }
        }
    };

    const unsigned workers = std::min<unsigned>(config.jobs, static_cast<unsigned>(convs.size()));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<VeracityPrediction> out;
    out.reserve(convs.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace rumor
