#pragma once
// Phase 1: split threads into certain (informed) and uncertain (uninformed)
// by their linguistic tone. Hard binary split, no entropy gate.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rumor/classifier/backend.hpp"
#include "rumor/core/random.hpp"
#include "rumor/corpus/conversation.hpp"
#include "rumor/corpus/pretrain.hpp"

namespace rumor::channels {

using classifier::ClassifierBackend;
using classifier::ClassifierInput;
using classifier::TrainingExample;
using classifier::TrainingRecipe;

struct ChannelAssignment {
    std::string thread_id;
    Certainty label = Certainty::Certain;
    BinaryProbs confidence;  // (certain, uncertain)

    friend bool operator==(const ChannelAssignment&, const ChannelAssignment&) = default;
};

using AssignmentMap = std::map<std::string, ChannelAssignment>;

inline ClassifierInput certainty_input(const corpus::Post& thread) {
    return ClassifierInput::single(thread.text_clean);
}

inline ChannelAssignment classify_certainty(const corpus::Post& thread, const ClassifierBackend& backend) {
    const auto probs = classifier::predict_probs<2>(backend, certainty_input(thread));
    return {thread.id, probs.argmax() == 0 ? Certainty::Certain : Certainty::Uncertain, probs};
}

inline AssignmentMap assign_all(std::span<const corpus::Conversation> convs, const ClassifierBackend& backend) {
    AssignmentMap out;
    for (const auto& c : convs) out.emplace(c.thread.id, classify_certainty(c.thread, backend));
    return out;
}

inline TrainingExample certainty_example(std::string text, Certainty label) {
    return {ClassifierInput::single(std::move(text)), classifier::one_hot_target<2>(index_of(label))};
}

struct Phase1Training {
    std::vector<TrainingExample> pretrain;
    std::vector<TrainingExample> finetune;  // per_class certain examples, then per_class uncertain
};

// The pretrain corpus passes through; the fine-tune corpus is resampled to
// exactly per_class examples per class without replacement.
inline Phase1Training build_phase1_training(const corpus::HedgeCorpus& pretrain_corpus,
                                            const std::vector<corpus::LabeledText<Certainty>>& finetune_corpus,
                                            std::size_t per_class, std::uint64_t seed) {
    Phase1Training out;
    out.pretrain.reserve(pretrain_corpus.size());
    for (const auto& item : pretrain_corpus) out.pretrain.push_back(certainty_example(item.text, item.label));

    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < finetune_corpus.size(); ++i)
        by_class[index_of(finetune_corpus[i].label)].push_back(i);
    for (std::size_t k = 0; k < 2; ++k)
        if (by_class[k].size() < per_class)
            throw InsufficientClassExamples("need " + std::to_string(per_class) + " " +
                                            std::string(to_string(static_cast<Certainty>(k))) +
                                            " examples, corpus has " + std::to_string(by_class[k].size()));

    Rng rng(seed);
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t i : sample_without_replacement(by_class[k], per_class, rng))
            out.finetune.push_back(certainty_example(finetune_corpus[i].text, finetune_corpus[i].label));
    return out;
}

// Labels each training thread with the (pretrained) classifier's own call.
inline std::vector<corpus::LabeledText<Certainty>> self_label(std::span<const corpus::Conversation> threads,
                                                              const ClassifierBackend& backend) {
    std::vector<corpus::LabeledText<Certainty>> out;
    out.reserve(threads.size());
    for (const auto& c : threads) out.push_back({c.thread.text_clean, classify_certainty(c.thread, backend).label});
    return out;
}

struct Phase1Recipes {
    TrainingRecipe pretrain{5, 32, 5e-5, 0.2, "adam"};
    TrainingRecipe finetune{5, 32, 5e-5, 0.2, "adam"};
    std::size_t per_class = 21;
};

struct Phase1Summary {
    std::size_t pretrain_size = 0;
    std::size_t self_labeled_certain = 0;
    std::size_t self_labeled_uncertain = 0;
    std::size_t finetune_size = 0;
};

// Pretrain on the hedge corpus, self-label the training threads, resample
// per_class per class from those machine labels and fine-tune.
inline Phase1Summary train_phase1(ClassifierBackend& backend, const corpus::HedgeCorpus& hedge,
                                  std::span<const corpus::Conversation> train_split, const Phase1Recipes& recipes,
                                  std::uint64_t seed) {
    Phase1Summary summary;
    const auto pretrain = build_phase1_training(hedge, {}, 0, seed).pretrain;
    summary.pretrain_size = pretrain.size();
    backend.fit(pretrain, recipes.pretrain);

    const auto labeled = self_label(train_split, backend);
    for (const auto& item : labeled)
        ++(item.label == Certainty::Certain ? summary.self_labeled_certain : summary.self_labeled_uncertain);

    const auto sets = build_phase1_training({}, labeled, recipes.per_class, seed);
    summary.finetune_size = sets.finetune.size();
    backend.fit(sets.finetune, recipes.finetune);
    return summary;
}

}  // namespace rumor::channels
