#pragma once
// Confusion matrix, the four reported metrics and the report grid.
//
// Per-class P = m_ii / col_i, R = m_ii / row_i, F1 = 2PR / (P + R); a zero
// denominator contributes 0 for that class. Macro values are unweighted
// means over true / false / unverified.

#include <array>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rumor/pipeline/pipeline.hpp"

namespace rumor::evaluation {

using GoldLabels = std::map<std::string, Veracity>;
using ojson = nlohmann::ordered_json;

struct ConfusionMatrix {
    // counts[gold][predicted], order true / false / unverified
    std::array<std::array<std::size_t, 3>, 3> counts{};

    std::size_t total() const {
        std::size_t t = 0;
        for (const auto& row : counts)
            for (std::size_t v : row) t += v;
        return t;
    }
    std::size_t trace() const { return counts[0][0] + counts[1][1] + counts[2][2]; }
    std::size_t row_sum(std::size_t g) const { return counts[g][0] + counts[g][1] + counts[g][2]; }
    std::size_t col_sum(std::size_t p) const { return counts[0][p] + counts[1][p] + counts[2][p]; }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        for (std::size_t g = 0; g < 3; ++g)
            for (std::size_t p = 0; p < 3; ++p) counts[g][p] += o.counts[g][p];
        return *this;
    }
    friend ConfusionMatrix operator+(ConfusionMatrix a, const ConfusionMatrix& b) { return a += b; }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Predictions and gold labels must cover the same thread ids.
inline ConfusionMatrix confusion(std::span<const VeracityPrediction> preds, const GoldLabels& golds) {
    ConfusionMatrix m;
    std::map<std::string, Veracity> predicted;
    for (const auto& p : preds)
        if (!predicted.emplace(p.thread_id, p.label).second)
            throw IdMismatch("thread '" + p.thread_id + "' predicted twice");
    if (predicted.size() != golds.size())
        throw IdMismatch(std::to_string(predicted.size()) + " predictions vs " + std::to_string(golds.size()) +
                         " gold labels");
    for (const auto& [id, label] : predicted) {
        auto it = golds.find(id);
        if (it == golds.end()) throw IdMismatch("no gold label for thread '" + id + "'");
        ++m.counts[index_of(it->second)][index_of(label)];
    }
    return m;
}

enum class Averaging { Macro, Micro };

inline std::string_view to_string(Averaging a) { return a == Averaging::Macro ? "macro" : "micro"; }

struct Metrics {
    double macro_f1 = 0.0;
    double accuracy = 0.0;
    double precision = 0.0;  // macro (or micro) average
    double recall = 0.0;
    std::array<double, 3> class_precision{};
    std::array<double, 3> class_recall{};
    std::array<double, 3> class_f1{};
};

inline Metrics metrics(const ConfusionMatrix& m, Averaging averaging = Averaging::Macro) {
    const std::size_t total = m.total();
    if (total == 0) throw EmptyMatrix("cannot compute metrics of an empty confusion matrix");
    auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };

    Metrics out;
    for (std::size_t k = 0; k < 3; ++k) {
        const double tp = static_cast<double>(m.counts[k][k]);
        const double p = ratio(tp, static_cast<double>(m.col_sum(k)));
        const double r = ratio(tp, static_cast<double>(m.row_sum(k)));
        out.class_precision[k] = p;
        out.class_recall[k] = r;
        out.class_f1[k] = ratio(2.0 * p * r, p + r);
    }
    out.accuracy = static_cast<double>(m.trace()) / static_cast<double>(total);
    out.macro_f1 = (out.class_f1[0] + out.class_f1[1] + out.class_f1[2]) / 3.0;
    if (averaging == Averaging::Macro) {
        out.precision = (out.class_precision[0] + out.class_precision[1] + out.class_precision[2]) / 3.0;
        out.recall = (out.class_recall[0] + out.class_recall[1] + out.class_recall[2]) / 3.0;
    } else {
        // Single-label multi-class: micro P = micro R = accuracy.
        out.precision = out.accuracy;
        out.recall = out.accuracy;
    }
    return out;
}

// One configuration's predictions; golds absent when the corpus is unlabeled.
struct RunResult {
    PipelineConfig config;
    std::vector<VeracityPrediction> predictions;
    std::optional<GoldLabels> golds;
};

struct EvaluationReport {
    std::string name;
    PipelineConfig config;
    std::optional<Metrics> metrics;
    std::optional<ConfusionMatrix> matrix;
    double avg_replies = 0.0;   // over threads with >= 1 surviving primary reply
    std::size_t n_threads = 0;  // threads with >= 1 surviving primary reply
    std::size_t n_predictions = 0;
};

inline GoldLabels gold_labels(std::span<const corpus::Conversation> convs) {
    GoldLabels g;
    for (const auto& c : convs)
        if (c.gold_label) g.emplace(c.thread.id, *c.gold_label);
    return g;
}

inline EvaluationReport evaluate(const RunResult& run, Averaging averaging = Averaging::Macro) {
    EvaluationReport r;
    r.name = run.config.label();
    r.config = run.config;
    r.n_predictions = run.predictions.size();
    std::size_t replies = 0;
    for (const auto& p : run.predictions) {
        if (p.n_primary_replies == 0) continue;
        ++r.n_threads;
        replies += p.n_primary_replies;
    }
    r.avg_replies = r.n_threads ? static_cast<double>(replies) / static_cast<double>(r.n_threads) : 0.0;
    if (run.golds && !run.golds->empty()) {
        r.matrix = confusion(run.predictions, *run.golds);
        r.metrics = metrics(*r.matrix, averaging);
    }
    return r;
}

inline std::vector<std::string> report_notes(Averaging averaging, double epsilon) {
    char eps[64];
    std::snprintf(eps, sizeof eps, "%g", epsilon);
    return {
        "per-class precision/recall/F1 with a zero denominator count as 0",
        std::string("precision and recall are ") + std::string(to_string(averaging)) + "-averaged over 3 classes",
        std::string("unverified iff self-entropy >= 1 - epsilon, epsilon = ") + eps,
        "Avg # and # thr count threads with at least one surviving primary reply",
        "stance fine-tune labels: true->agreement, false->disagreement, unverified->none",
        "deception corpus labels: truthful->true, deceptive->false",
        "stance pretraining covers agreement/disagreement only; none is learned at fine-tune",
    };
}

inline std::string format_fixed(double v, int digits = 4) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// Text table with one row per configuration.
inline std::string render_table(std::span<const EvaluationReport> reports) {
    const std::vector<std::string> header{"Config", "Macro-F1", "Accuracy", "Precision", "Recall", "Avg #", "# thr"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : reports) {
        auto metric = [&](double Metrics::*field) {
            return r.metrics ? format_fixed((*r.metrics).*field) : std::string("-");
        };
        rows.push_back({r.name, metric(&Metrics::macro_f1), metric(&Metrics::accuracy), metric(&Metrics::precision),
                        metric(&Metrics::recall), format_fixed(r.avg_replies, 2), std::to_string(r.n_threads)});
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            out << (c ? " | " : "");
            if (c == 0) out << cells[c] << std::string(width[c] - cells[c].size(), ' ');
            else out << std::string(width[c] - cells[c].size(), ' ') << cells[c];
        }
        out << '\n';
    };
    emit(header);
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "-+-" : "") << std::string(width[c], '-');
    out << '\n';
    for (const auto& row : rows) emit(row);
    return out.str();
}

inline ojson to_json(const EvaluationReport& r) {
    ojson j{{"name", r.name},
            {"mode", to_string(r.config.mode)},
            {"entropy_epsilon", r.config.entropy_epsilon},
            {"reply_window_days", r.config.reply_window_days ? ojson(*r.config.reply_window_days) : ojson(nullptr)},
            {"seed", r.config.seed},
            {"n_predictions", r.n_predictions},
            {"avg_replies", r.avg_replies},
            {"n_threads", r.n_threads}};
    if (r.metrics) {
        const Metrics& m = *r.metrics;
        j["metrics"] = {{"macro_f1", m.macro_f1},
                        {"accuracy", m.accuracy},
                        {"precision", m.precision},
                        {"recall", m.recall},
                        {"class_precision", m.class_precision},
                        {"class_recall", m.class_recall},
                        {"class_f1", m.class_f1}};
        j["confusion"] = r.matrix->counts;
    } else {
        j["metrics"] = nullptr;
        j["confusion"] = nullptr;
    }
    return j;
}

struct ReportGrid {
    std::vector<EvaluationReport> reports;
    std::vector<std::string> notes;

    std::string table() const {
        std::string out = render_table(reports);
        for (const auto& n : notes) out += "note: " + n + "\n";
        return out;
    }

    ojson json() const {
        ojson rows = ojson::array();
        for (const auto& r : reports) rows.push_back(to_json(r));
        return ojson{{"class_order", {"true", "false", "unverified"}}, {"notes", notes}, {"runs", std::move(rows)}};
    }
};

inline ReportGrid report_grid(std::span<const RunResult> runs, Averaging averaging = Averaging::Macro) {
    ReportGrid grid;
    double epsilon = kDefaultEntropyEpsilon;
    for (const auto& run : runs) {
        grid.reports.push_back(evaluate(run, averaging));
        epsilon = run.config.entropy_epsilon;
    }
    grid.notes = report_notes(averaging, epsilon);
    bool unlabeled = false;
    for (const auto& r : grid.reports) unlabeled = unlabeled || !r.metrics;
    if (unlabeled) grid.notes.push_back("corpus has no gold labels; metrics skipped");
    return grid;
}

}  // namespace rumor::evaluation
