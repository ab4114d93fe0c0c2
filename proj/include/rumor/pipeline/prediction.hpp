#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rumor/channels/certainty.hpp"
#include "rumor/core/prob_vector.hpp"

namespace rumor {

inline constexpr const char* kWarnNoPrimaryReplies = "no-primary-replies";
inline constexpr const char* kWarnDegenerateEvidence = "degenerate-evidence";

struct VeracityPrediction {
    std::string thread_id;
    Veracity label = Veracity::Unverified;
    Channel channel = Channel::Lie;
    std::optional<channels::ChannelAssignment> assignment;  // absent when Phase 1 is skipped
    BinaryProbs evidence;                                    // (true, false) / (agree, disagree)
    double entropy = 1.0;
    std::size_t n_replies_used = 0;     // primary replies aggregated by the agreement channel
    std::size_t n_primary_replies = 0;  // primary replies available after any window
    std::vector<std::string> warnings;
    std::optional<BinaryProbs> lie_evidence;  // lie detector on every thread (--all)

    friend bool operator==(const VeracityPrediction&, const VeracityPrediction&) = default;
};

// Builds the evidence-carrying prediction the channels return.
inline VeracityPrediction make_prediction(std::string thread_id, Channel channel, const BinaryProbs& evidence,
                                          double epsilon) {
    VeracityPrediction p;
    p.thread_id = std::move(thread_id);
    p.channel = channel;
    p.evidence = evidence;
    p.entropy = self_entropy(evidence);
    p.label = decide(evidence, kTrueFalse, epsilon);
    return p;
}

using ojson = nlohmann::ordered_json;

inline ojson to_json(const VeracityPrediction& p) {
    ojson j{{"thread_id", p.thread_id},
            {"label", to_string(p.label)},
            {"channel", to_string(p.channel)},
            {"evidence", {p.evidence[0], p.evidence[1]}},
            {"entropy", p.entropy},
            {"n_replies_used", p.n_replies_used},
            {"warnings", p.warnings},
            {"n_primary_replies", p.n_primary_replies}};
    if (p.assignment)
        j["assignment"] = {{"label", to_string(p.assignment->label)},
                           {"confidence", {p.assignment->confidence[0], p.assignment->confidence[1]}}};
    else
        j["assignment"] = nullptr;
    if (p.lie_evidence) j["lie_evidence"] = {(*p.lie_evidence)[0], (*p.lie_evidence)[1]};
    return j;
}

inline VeracityPrediction prediction_from_json(const ojson& j) {
    auto pair = [](const ojson& a) { return BinaryProbs{a.at(0).get<double>(), a.at(1).get<double>()}; };
    try {
        VeracityPrediction p;
        p.thread_id = j.at("thread_id").get<std::string>();
        p.label = require_label<Veracity>(j.at("label").get<std::string>(), parse_veracity, "veracity");
        p.channel = require_label<Channel>(j.at("channel").get<std::string>(), parse_channel, "channel");
        p.evidence = pair(j.at("evidence"));
        p.entropy = j.at("entropy").get<double>();
        p.n_replies_used = j.at("n_replies_used").get<std::size_t>();
        p.warnings = j.at("warnings").get<std::vector<std::string>>();
        if (auto it = j.find("n_primary_replies"); it != j.end()) p.n_primary_replies = it->get<std::size_t>();
        if (auto it = j.find("assignment"); it != j.end() && !it->is_null()) {
            channels::ChannelAssignment a;
            a.thread_id = p.thread_id;
            a.label = require_label<Certainty>(it->at("label").get<std::string>(), parse_certainty, "certainty");
            a.confidence = pair(it->at("confidence"));
            p.assignment = a;
        }
        if (auto it = j.find("lie_evidence"); it != j.end()) p.lie_evidence = pair(*it);
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw CorpusFormatError(std::string("bad prediction record: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw CorpusFormatError(std::string("bad prediction record: ") + e.what());
    }
}

}  // namespace rumor
