#pragma once
// Phase 2-1: lexical lie detection on certain-routed threads. The softmax
// over (true, false) goes through the entropy gate, so a maximally unsure
// detector yields "unverified".

#include <span>
#include <string>
#include <vector>

#include "rumor/channels/certainty.hpp"
#include "rumor/corpus/pretrain.hpp"
#include "rumor/pipeline/prediction.hpp"

namespace rumor::channels {

inline ClassifierInput lie_input(const corpus::Post& thread) { return ClassifierInput::single(thread.text_clean); }

inline BinaryProbs lie_probs(const corpus::Post& thread, const ClassifierBackend& backend) {
    return classifier::predict_probs<2>(backend, lie_input(thread));
}

inline VeracityPrediction classify_lie(const corpus::Post& thread, const ClassifierBackend& backend, double epsilon) {
    return make_prediction(thread.id, Channel::Lie, lie_probs(thread, backend), epsilon);
}

inline TrainingExample lie_example(std::string text, Veracity label) {
    return {ClassifierInput::single(std::move(text)), classifier::one_hot_target<2>(index_of(label))};
}

struct Phase21Training {
    std::vector<TrainingExample> pretrain;
    std::vector<TrainingExample> finetune;
    std::vector<std::string> warnings;
};

// Fine-tunes on gold true/false threads that Phase 1 routed to "certain".
// With phase1 == nullptr every true/false thread is used (single-channel
// ablation).
inline Phase21Training build_phase21_training(const corpus::DeceptionCorpus& pretrain_corpus,
                                              std::span<const corpus::Conversation> train_split,
                                              const AssignmentMap* phase1) {
    Phase21Training out;
    out.pretrain.reserve(pretrain_corpus.size());
    for (const auto& item : pretrain_corpus) {
        if (item.label == Veracity::Unverified) continue;
        out.pretrain.push_back(lie_example(item.text, item.label));
    }
    for (const auto& c : train_split) {
        if (!c.gold_label || *c.gold_label == Veracity::Unverified) continue;
        if (phase1) {
            auto it = phase1->find(c.thread.id);
            if (it == phase1->end())
                throw UsageError("Phase 1 assignments do not cover thread '" + c.thread.id + "'");
            if (it->second.label != Certainty::Certain) continue;
        }
        out.finetune.push_back(lie_example(c.thread.text_clean, *c.gold_label));
    }
    if (out.finetune.empty()) out.warnings.push_back("phase 2-1 fine-tune set is empty; using pretrained state only");
    return out;
}

struct Phase21Recipes {
    TrainingRecipe pretrain{5, 32, 5e-5, 0.3, "adam"};
    TrainingRecipe finetune{1, 32, 5e-5, 0.3, "adam"};
};

inline Phase21Training train_phase21(ClassifierBackend& backend, const corpus::DeceptionCorpus& deception,
                                     std::span<const corpus::Conversation> train_split, const AssignmentMap* phase1,
                                     const Phase21Recipes& recipes) {
    auto sets = build_phase21_training(deception, train_split, phase1);
    backend.fit(sets.pretrain, recipes.pretrain);
    if (!sets.finetune.empty()) backend.fit(sets.finetune, recipes.finetune);
    return sets;
}

}  // namespace rumor::channels
