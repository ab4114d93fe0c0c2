#pragma once
// Phase 2-2: score every (thread, primary reply) pair over
// (agreement, disagreement, none), drop the none mass, and normalize the
// summed agreement/disagreement mass into a two-way vector:
//
//   ( sum a_k / (sum a_k + sum b_k),  sum b_k / (sum a_k + sum b_k) )
//
// which then goes through the same entropy-gated decision as Phase 2-1.

#include <span>
#include <string>
#include <vector>

#include "rumor/channels/certainty.hpp"
#include "rumor/corpus/pretrain.hpp"
#include "rumor/pipeline/prediction.hpp"

namespace rumor::channels {

struct StanceScore {
    corpus::ThreadReplyPair pair;
    TernaryProbs softmax;  // (agreement, disagreement, none)
};

struct AggregateScore {
    std::string thread_id;
    BinaryProbs normalized;  // (agree, disagree)
    std::size_t n_replies = 0;
};

inline ClassifierInput stance_input(const corpus::ThreadReplyPair& pair) {
    return ClassifierInput::pair(pair.thread_text, pair.reply_text);
}

inline std::vector<StanceScore> score_pairs(const corpus::Conversation& conv, const ClassifierBackend& backend) {
    std::vector<StanceScore> scores;
    for (auto& pair : corpus::primary_pairs(conv)) {
        auto probs = classifier::predict_probs<3>(backend, stance_input(pair));
        scores.push_back({std::move(pair), probs});
    }
    return scores;
}

inline AggregateScore aggregate(std::span<const StanceScore> scores) {
    if (scores.empty()) throw EmptyEvidence("no stance scores to aggregate");
    double agree = 0.0;
    double disagree = 0.0;
    for (const auto& s : scores) {
        agree += s.softmax[index_of(Stance::Agreement)];
        disagree += s.softmax[index_of(Stance::Disagreement)];
    }
    if (!(agree + disagree > 0.0))
        throw DegenerateEvidence("every reply of '" + scores.front().pair.thread_id + "' scored as pure none");
    return {scores.front().pair.thread_id, BinaryProbs::normalized({agree, disagree}), scores.size()};
}

// Threads without primary replies, or whose replies carry no
// agree/disagree mass, are unverified with a warning.
inline VeracityPrediction classify_agreement(const corpus::Conversation& conv, const ClassifierBackend& backend,
                                             double epsilon) {
    const auto scores = score_pairs(conv, backend);
    if (scores.empty()) {
        auto p = make_prediction(conv.thread.id, Channel::Agreement, BinaryProbs{}, epsilon);
        p.warnings.emplace_back(kWarnNoPrimaryReplies);
        return p;
    }
    try {
        const auto agg = aggregate(scores);
        auto p = make_prediction(conv.thread.id, Channel::Agreement, agg.normalized, epsilon);
        p.n_replies_used = agg.n_replies;
        return p;
    } catch (const DegenerateEvidence&) {
        auto p = make_prediction(conv.thread.id, Channel::Agreement, BinaryProbs{}, epsilon);
        p.n_replies_used = scores.size();
        p.warnings.emplace_back(kWarnDegenerateEvidence);
        return p;
    }
}

inline TrainingExample stance_example(std::string thread, std::string reply, Stance label) {
    return {ClassifierInput::pair(std::move(thread), std::move(reply)),
            classifier::one_hot_target<3>(index_of(label))};
}

struct Phase22Training {
    std::vector<TrainingExample> pretrain;
    std::vector<TrainingExample> finetune;
};

// Every primary pair of the training split, labeled through the thread's
// gold veracity (true -> agreement, false -> disagreement, unverified -> none).
inline Phase22Training build_phase22_training(const corpus::AgreementCorpus& pretrain_corpus,
                                              std::span<const corpus::Conversation> train_split,
                                              const corpus::StanceMapping& mapping = {}) {
    Phase22Training out;
    out.pretrain.reserve(pretrain_corpus.size());
    for (const auto& item : pretrain_corpus) out.pretrain.push_back(stance_example(item.first, item.second, item.label));
    for (const auto& c : train_split) {
        if (!c.gold_label) continue;
        for (auto& pair : corpus::primary_pairs(c, mapping)) {
            if (!pair.gold_stance) continue;
            out.finetune.push_back(stance_example(std::move(pair.thread_text), std::move(pair.reply_text), *pair.gold_stance));
        }
    }
    return out;
}

struct Phase22Recipes {
    TrainingRecipe pretrain{5, 32, 5e-5, 0.3, "adam"};
    TrainingRecipe finetune{1, 32, 5e-5, 0.3, "adam"};
};

inline Phase22Training train_phase22(ClassifierBackend& backend, const corpus::AgreementCorpus& agreement,
                                     std::span<const corpus::Conversation> train_split,
                                     const corpus::StanceMapping& mapping, const Phase22Recipes& recipes) {
    auto sets = build_phase22_training(agreement, train_split, mapping);
    backend.fit(sets.pretrain, recipes.pretrain);
    if (!sets.finetune.empty()) backend.fit(sets.finetune, recipes.finetune);
    return sets;
}

}  // namespace rumor::channels
