#pragma once
// Trains the classifiers an experiment grid needs and runs every row.
// Double and inverse modes share one model set; the single-lie ablation
// retrains the lie detector on all true/false training threads instead of
// only the Phase-1-certain ones. The stance model already fine-tunes on all
// primary pairs, so every mode shares it.

#include <memory>
#include <string>
#include <vector>

#include "rumor/classifier/model_file.hpp"
#include "rumor/evaluation/evaluation.hpp"
#include "rumor/pipeline/pipeline.hpp"

namespace rumor {

struct TrainingCorpora {
    corpus::HedgeCorpus hedge;
    corpus::DeceptionCorpus deception;
    corpus::AgreementCorpus agreement;
    std::vector<corpus::Conversation> train;
};

struct TrainingPlan {
    classifier::BackendSettings backend;
    channels::Phase1Recipes phase1;
    channels::Phase21Recipes phase21;
    channels::Phase22Recipes phase22;
    corpus::StanceMapping stance_mapping;
    std::uint64_t seed = 0;
};

// Per-backend seeds derived from the run seed so the three models differ.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    return seed * 0x9E3779B97F4A7C15ull + salt;
}

inline std::unique_ptr<classifier::ClassifierBackend> new_backend(const TrainingPlan& plan, std::size_t classes,
                                                                  classifier::InputKind input, std::uint64_t salt) {
    auto settings = plan.backend;
    settings.reference.seed = derive_seed(plan.seed, salt);
    return classifier::make_backend(settings, classes, input);
}

struct TrainedModels {
    std::unique_ptr<classifier::ClassifierBackend> certainty;
    std::unique_ptr<classifier::ClassifierBackend> lie;      // fine-tuned on Phase-1-certain threads
    std::unique_ptr<classifier::ClassifierBackend> lie_all;  // fine-tuned on every true/false thread
    std::unique_ptr<classifier::ClassifierBackend> stance;
    channels::Phase1Summary phase1;
    std::vector<std::string> warnings;

    Backends for_mode(Mode mode) const {
        return {certainty.get(), mode == Mode::SingleLie ? lie_all.get() : lie.get(), stance.get()};
    }
};

inline std::unique_ptr<classifier::ClassifierBackend> train_certainty_model(const TrainingPlan& plan,
                                                                            const TrainingCorpora& data,
                                                                            channels::Phase1Summary* summary = nullptr) {
    auto backend = new_backend(plan, 2, classifier::InputKind::Single, 1);
    auto s = channels::train_phase1(*backend, data.hedge, data.train, plan.phase1, plan.seed);
    if (summary) *summary = s;
    return backend;
}

inline std::unique_ptr<classifier::ClassifierBackend> train_lie_model(const TrainingPlan& plan,
                                                                      const TrainingCorpora& data,
                                                                      const channels::AssignmentMap* phase1,
                                                                      std::vector<std::string>* warnings = nullptr) {
    auto backend = new_backend(plan, 2, classifier::InputKind::Single, 2);
    auto sets = channels::train_phase21(*backend, data.deception, data.train, phase1, plan.phase21);
    if (warnings) warnings->insert(warnings->end(), sets.warnings.begin(), sets.warnings.end());
    return backend;
}

inline std::unique_ptr<classifier::ClassifierBackend> train_stance_model(const TrainingPlan& plan,
                                                                         const TrainingCorpora& data) {
    auto backend = new_backend(plan, 3, classifier::InputKind::Pair, 3);
    channels::train_phase22(*backend, data.agreement, data.train, plan.stance_mapping, plan.phase22);
    return backend;
}

inline TrainedModels train_models(const TrainingPlan& plan, const TrainingCorpora& data, bool with_lie_all = true) {
    TrainedModels m;
    m.certainty = train_certainty_model(plan, data, &m.phase1);
    const auto assignments = channels::assign_all(data.train, *m.certainty);
    m.lie = train_lie_model(plan, data, &assignments, &m.warnings);
    if (with_lie_all) m.lie_all = train_lie_model(plan, data, nullptr, &m.warnings);
    m.stance = train_stance_model(plan, data);
    return m;
}

struct GridSpec {
    std::vector<Mode> modes{kAllModes.begin(), kAllModes.end()};
    std::vector<int> windows;  // extra double-mode rows restricted to these reply windows
    PipelineConfig base;
};

inline std::vector<evaluation::RunResult> run_grid(const GridSpec& spec, const TrainedModels& models,
                                                   std::span<const corpus::Conversation> test) {
    std::vector<evaluation::RunResult> runs;
    const auto golds = evaluation::gold_labels(test);
    const bool labeled = !golds.empty();
    auto run_one = [&](PipelineConfig cfg) {
        evaluation::RunResult r;
        r.predictions = run_batch(test, cfg, models.for_mode(cfg.mode));
        r.config = std::move(cfg);
        if (labeled) r.golds = golds;
        runs.push_back(std::move(r));
    };
    for (Mode mode : spec.modes) {
        PipelineConfig cfg = spec.base;
        cfg.mode = mode;
        run_one(cfg);
    }
    for (int days : spec.windows) {
        PipelineConfig cfg = spec.base;
        cfg.mode = Mode::Double;
        cfg.reply_window_days = days;
        run_one(cfg);
    }
    return runs;
}

}  // namespace rumor
