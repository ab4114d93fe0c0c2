#include <gtest/gtest.h>

#include <set>

#include "mock_backend.hpp"
#include "rumor/evaluation/evaluation.hpp"
#include "rumor/pipeline/ablation.hpp"
#include "synthetic.hpp"

using namespace rumor;
namespace fx = rumor::testing;
using rumor::classifier::InputKind;
using rumor::testing::MockBackend;

namespace {

// Phase 1 calls a thread uncertain when it carries a hedge word.
MockBackend::Rule hedge_rule() {
    return [](const classifier::ClassifierInput& in) {
        for (const auto& w : fx::kHedge)
            if (in.text.find(w) != std::string::npos) return std::vector<double>{0.2, 0.8};
        return std::vector<double>{0.9, 0.1};
    };
}

MockBackend::Rule lie_rule() {
    return [](const classifier::ClassifierInput& in) {
        for (const auto& w : fx::kDeceptive)
            if (in.text.find(w) != std::string::npos) return std::vector<double>{0.1, 0.9};
        return std::vector<double>{0.8, 0.2};
    };
}

MockBackend::Rule stance_rule() {
    return [](const classifier::ClassifierInput& in) {
        for (const auto& w : fx::kDisagree)
            if (in.pair_text->find(w) != std::string::npos) return std::vector<double>{0.1, 0.7, 0.2};
        return std::vector<double>{0.7, 0.1, 0.2};
    };
}

struct Mocks {
    MockBackend certainty{2, InputKind::Single, hedge_rule()};
    MockBackend lie{2, InputKind::Single, lie_rule()};
    MockBackend stance{3, InputKind::Pair, stance_rule()};
    Backends view() const { return {&certainty, &lie, &stance}; }
};

std::set<std::string> routed_to(const std::vector<VeracityPrediction>& preds, Channel ch) {
    std::set<std::string> out;
    for (const auto& p : preds)
        if (p.channel == ch) out.insert(p.thread_id);
    return out;
}

}  // namespace

TEST(Mode, NamesRoundTrip) {
    for (Mode m : kAllModes) EXPECT_EQ(parse_mode(to_string(m)), m);
    EXPECT_FALSE(parse_mode("triple"));
    EXPECT_TRUE(uses_phase1(Mode::Double));
    EXPECT_FALSE(uses_phase1(Mode::SingleAgreement));
}

TEST(Route, Table) {
    EXPECT_EQ(route(Mode::Double, Certainty::Certain), Channel::Lie);
    EXPECT_EQ(route(Mode::Double, Certainty::Uncertain), Channel::Agreement);
    EXPECT_EQ(route(Mode::Inverse, Certainty::Certain), Channel::Agreement);
    EXPECT_EQ(route(Mode::Inverse, Certainty::Uncertain), Channel::Lie);
    EXPECT_EQ(route(Mode::SingleLie, std::nullopt), Channel::Lie);
    EXPECT_EQ(route(Mode::SingleAgreement, std::nullopt), Channel::Agreement);
}

TEST(Pipeline, DoubleAndInverseSwapChannels) {
    const auto data = fx::make_synthetic({.seed = 12, .n_train = 0, .n_test = 40});
    Mocks m;
    PipelineConfig cfg;
    const auto dbl = run_batch(data.test, cfg, m.view());
    cfg.mode = Mode::Inverse;
    const auto inv = run_batch(data.test, cfg, m.view());
    EXPECT_EQ(routed_to(dbl, Channel::Lie), routed_to(inv, Channel::Agreement));
    EXPECT_EQ(routed_to(dbl, Channel::Agreement), routed_to(inv, Channel::Lie));
    EXPECT_EQ(routed_to(dbl, Channel::Lie).size(), 20u);
    for (std::size_t i = 0; i < dbl.size(); ++i) {
        ASSERT_TRUE(dbl[i].assignment);
        EXPECT_EQ(dbl[i].assignment, inv[i].assignment);
    }
}

TEST(Pipeline, SingleModesSkipPhase1) {
    const auto data = fx::make_synthetic({.seed = 13, .n_train = 0, .n_test = 20});
    for (Mode mode : {Mode::SingleLie, Mode::SingleAgreement}) {
        Mocks m;
        PipelineConfig cfg;
        cfg.mode = mode;
        const auto preds = run_batch(data.test, cfg, m.view());
        EXPECT_EQ(m.certainty.predict_calls, 0u);
        const Channel ch = mode == Mode::SingleLie ? Channel::Lie : Channel::Agreement;
        EXPECT_EQ(routed_to(preds, ch).size(), 20u);
        for (const auto& p : preds) EXPECT_FALSE(p.assignment);
        if (mode == Mode::SingleLie) EXPECT_EQ(m.stance.predict_calls, 0u);
        else EXPECT_EQ(m.lie.predict_calls, 0u);
    }
    // Single modes run without a certainty backend at all.
    Mocks m;
    PipelineConfig cfg;
    cfg.mode = Mode::SingleLie;
    EXPECT_NO_THROW(run_batch(data.test, cfg, {nullptr, &m.lie, nullptr}));
    cfg.mode = Mode::Double;
    EXPECT_THROW(run_batch(data.test, cfg, {nullptr, &m.lie, &m.stance}), UntrainedBackend);
}

TEST(Pipeline, RandomRoutingTablesProperty) {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + uniform_index(rng, 12);
        std::vector<corpus::Conversation> convs;
        std::map<std::string, std::vector<double>> phase1;
        for (std::size_t i = 0; i < n; ++i) {
            corpus::Conversation c;
            c.thread = corpus::make_post("t" + std::to_string(i), "thread " + std::to_string(i), {}, Platform::Twitter);
            convs.push_back(c);
            const double a = unit_draw(rng);
            phase1[c.thread.text_clean] = {a, 1.0 - a};
        }
        MockBackend cert(2, InputKind::Single, fx::lookup(phase1, {}));
        MockBackend lie(2, InputKind::Single, fx::lookup({}, {0.6, 0.4}));
        MockBackend stance(3, InputKind::Pair, fx::lookup({}, {0.4, 0.4, 0.2}));
        PipelineConfig cfg;
        const auto preds = run_batch(convs, cfg, {&cert, &lie, &stance});
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = phase1[convs[i].thread.text_clean];
            const Channel expect = p[0] >= p[1] ? Channel::Lie : Channel::Agreement;
            EXPECT_EQ(preds[i].channel, expect);
        }
    }
}

TEST(Pipeline, BatchOrderAndJobsDeterminism) {
    const auto data = fx::make_synthetic({.seed = 14, .n_train = 0, .n_test = 60});
    Mocks m;
    PipelineConfig cfg;
    const auto serial = run_batch(data.test, cfg, m.view());
    cfg.jobs = 4;
    const auto parallel = run_batch(data.test, cfg, m.view());
    ASSERT_EQ(serial.size(), data.test.size());
    for (std::size_t i = 0; i < serial.size(); ++i) EXPECT_EQ(serial[i].thread_id, data.test[i].thread.id);
    EXPECT_EQ(serial, parallel);
    EXPECT_TRUE(run_batch({}, cfg, {}).empty());
    cfg.jobs = 0;
    EXPECT_THROW(run_batch(data.test, cfg, m.view()), UsageError);
}

TEST(Pipeline, FailureInOneConversationSurfaces) {
    const auto data = fx::make_synthetic({.seed = 15, .n_train = 0, .n_test = 10});
    MockBackend cert(2, InputKind::Single, [](const classifier::ClassifierInput& in) {
        if (in.text.find("might") != std::string::npos) return std::vector<double>{0.5};  // wrong width
        return std::vector<double>{0.9, 0.1};
    });
    Mocks m;
    PipelineConfig cfg;
    cfg.jobs = 3;
    EXPECT_ANY_THROW(run_batch(data.test, cfg, {&cert, &m.lie, &m.stance}));
}

TEST(Pipeline, ReplayableFromRecordedEvidence) {
    const auto data = fx::make_synthetic({.seed = 16, .n_train = 0, .n_test = 40});
    Mocks m;
    for (Mode mode : kAllModes) {
        PipelineConfig cfg;
        cfg.mode = mode;
        for (const auto& p : run_batch(data.test, cfg, m.view())) {
            EXPECT_EQ(decide(p.evidence, kTrueFalse, cfg.entropy_epsilon), p.label);
            EXPECT_NEAR(self_entropy(p.evidence), p.entropy, 1e-15);
        }
    }
}

TEST(Pipeline, WindowLimitsAgreementEvidence) {
    const auto data = fx::make_synthetic({.seed = 17, .n_train = 0, .n_test = 30, .max_reply_days = 8.0});
    Mocks m;
    PipelineConfig cfg;
    cfg.mode = Mode::SingleAgreement;
    const auto full = run_batch(data.test, cfg, m.view());
    cfg.reply_window_days = 1;
    const auto day = run_batch(data.test, cfg, m.view());
    std::size_t fewer = 0;
    for (std::size_t i = 0; i < full.size(); ++i) {
        EXPECT_LE(day[i].n_primary_replies, full[i].n_primary_replies);
        EXPECT_LE(day[i].n_replies_used, day[i].n_primary_replies);
        fewer += day[i].n_primary_replies < full[i].n_primary_replies;
    }
    EXPECT_GT(fewer, 0u);
    cfg.reply_window_days = 0;
    EXPECT_THROW(run_batch(data.test, cfg, m.view()), UsageError);
}

TEST(Prediction, JsonRoundTrip) {
    const auto data = fx::make_synthetic({.seed = 18, .n_train = 0, .n_test = 12});
    Mocks m;
    PipelineConfig cfg;
    cfg.lie_on_all = true;
    for (const auto& p : run_batch(data.test, cfg, m.view())) {
        ASSERT_TRUE(p.lie_evidence);
        const auto back = prediction_from_json(ojson::parse(to_json(p).dump()));
        EXPECT_EQ(back.thread_id, p.thread_id);
        EXPECT_EQ(back.label, p.label);
        EXPECT_EQ(back.channel, p.channel);
        EXPECT_EQ(back.assignment, p.assignment);
        EXPECT_EQ(back.warnings, p.warnings);
        EXPECT_NEAR(back.evidence[0], p.evidence[0], 1e-15);
    }
    EXPECT_THROW(prediction_from_json(ojson{{"thread_id", "x"}}), CorpusFormatError);
}

TEST(Config, LabelNamesWindow) {
    PipelineConfig c;
    EXPECT_EQ(c.label(), "double");
    c.mode = Mode::SingleAgreement;
    c.reply_window_days = 3;
    EXPECT_EQ(c.label(), "single_agreement@3d");
}

TEST(Grid, RowsPerModeAndWindow) {
    const auto data = fx::make_synthetic({.seed = 19, .n_train = 0, .n_test = 30});
    TrainedModels models;
    models.certainty = std::make_unique<MockBackend>(2, InputKind::Single, hedge_rule());
    models.lie = std::make_unique<MockBackend>(2, InputKind::Single, lie_rule());
    models.lie_all = std::make_unique<MockBackend>(2, InputKind::Single, lie_rule());
    models.stance = std::make_unique<MockBackend>(3, InputKind::Pair, stance_rule());
    GridSpec spec;
    spec.windows = {1, 3};
    const auto runs = run_grid(spec, models, data.test);
    ASSERT_EQ(runs.size(), 6u);
    EXPECT_EQ(runs[4].config.label(), "double@1d");
    EXPECT_EQ(runs[5].config.label(), "double@3d");
    for (const auto& r : runs) {
        ASSERT_TRUE(r.golds);
        EXPECT_EQ(r.predictions.size(), 30u);
    }
    const auto grid = evaluation::report_grid(runs);
    EXPECT_EQ(grid.reports.size(), 6u);
    EXPECT_EQ(grid.json()["runs"].size(), 6u);
    EXPECT_NE(grid.table().find("double@3d"), std::string::npos);
}

TEST(Grid, TrainModelsEndToEnd) {
    const auto data = fx::make_synthetic({.seed = 7});
    TrainingPlan plan;
    plan.seed = 7;
    const auto models = train_models(plan, data.corpora);
    EXPECT_TRUE(models.certainty->trained());
    EXPECT_TRUE(models.lie->trained());
    EXPECT_TRUE(models.lie_all->trained());
    EXPECT_TRUE(models.stance->trained());
    EXPECT_EQ(models.phase1.finetune_size, 42u);
    const auto runs = run_grid({}, models, data.test);
    const auto grid = evaluation::report_grid(runs);
    ASSERT_EQ(grid.reports.size(), 4u);
    const double dbl = grid.reports[0].metrics->macro_f1;
    EXPECT_GE(dbl, 0.95);
    EXPECT_GT(dbl, grid.reports[1].metrics->macro_f1);
    EXPECT_GT(dbl, grid.reports[2].metrics->macro_f1);
}
