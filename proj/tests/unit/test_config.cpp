#include <gtest/gtest.h>

#include <sstream>

#include "rumor/cli/config.hpp"
#include "rumor/cli/manifest.hpp"
#include "temp_dir.hpp"

using namespace rumor;
using namespace rumor::cli;

namespace {

FlatConfig parse(const std::string& text) {
    std::istringstream in(text);
    return FlatConfig::parse(in);
}

}  // namespace

TEST(FlatConfig, ParsesKeyValues) {
    const auto c = parse("# comment\n\nseed = 42\n  mode=inverse  \nhedge_corpus = /data/hedge file.tsv\n");
    EXPECT_EQ(c.get("seed"), "42");
    EXPECT_EQ(c.get("mode"), "inverse");
    EXPECT_EQ(c.get("hedge_corpus"), "/data/hedge file.tsv");
    EXPECT_EQ(c.get("absent", "x"), "x");
    EXPECT_EQ(c.number<int>("seed", 0), 42);
    EXPECT_THROW(parse("no equals sign\n"), UsageError);
    EXPECT_THROW(parse(" = value\n"), UsageError);
    EXPECT_THROW(parse("seed = 4x\n").number<int>("seed", 0), UsageError);
    EXPECT_THROW(parse("lie_on_all = maybe\n").flag("lie_on_all", false), UsageError);
}

TEST(Settings, Defaults) {
    const auto s = settings_from(FlatConfig{});
    EXPECT_EQ(s.plan.backend.kind, "reference");
    EXPECT_EQ(s.plan.phase1.pretrain, (classifier::TrainingRecipe{5, 32, 5e-5, 0.2, "adam"}));
    EXPECT_EQ(s.plan.phase1.finetune, (classifier::TrainingRecipe{5, 32, 5e-5, 0.2, "adam"}));
    EXPECT_EQ(s.plan.phase1.per_class, 21u);
    EXPECT_EQ(s.plan.phase21.pretrain, (classifier::TrainingRecipe{5, 32, 5e-5, 0.3, "adam"}));
    EXPECT_EQ(s.plan.phase21.finetune, (classifier::TrainingRecipe{1, 32, 5e-5, 0.3, "adam"}));
    EXPECT_EQ(s.plan.phase22.pretrain, (classifier::TrainingRecipe{5, 32, 5e-5, 0.3, "adam"}));
    EXPECT_EQ(s.plan.phase22.finetune, (classifier::TrainingRecipe{1, 32, 5e-5, 0.3, "adam"}));
    EXPECT_EQ(s.pipeline.mode, Mode::Double);
    EXPECT_DOUBLE_EQ(s.pipeline.entropy_epsilon, 1e-3);
    EXPECT_FALSE(s.pipeline.reply_window_days);
    EXPECT_FALSE(s.plan.stance_mapping.skip_unverified);
    EXPECT_EQ(s.averaging, evaluation::Averaging::Macro);
    EXPECT_EQ(s.windows, (std::vector<int>{1, 3, 5}));
}

TEST(Settings, Overrides) {
    const auto s = settings_from(parse("seed = 9\nmode = single_agreement\nwindow_days = 3\nepsilon = 0\n"
                                       "phase21.finetune.epochs = 2\nstance.unverified = skip\naverage = micro\n"
                                       "ablate.windows = 2,4\njobs = 2\n"));
    EXPECT_EQ(s.plan.seed, 9u);
    EXPECT_EQ(s.pipeline.seed, 9u);
    EXPECT_EQ(s.pipeline.mode, Mode::SingleAgreement);
    EXPECT_EQ(s.pipeline.reply_window_days, 3);
    EXPECT_EQ(s.pipeline.entropy_epsilon, 0.0);
    EXPECT_EQ(s.plan.phase21.finetune.epochs, 2);
    EXPECT_TRUE(s.plan.stance_mapping.skip_unverified);
    EXPECT_EQ(s.averaging, evaluation::Averaging::Micro);
    EXPECT_EQ(s.windows, (std::vector<int>{2, 4}));
    EXPECT_EQ(s.pipeline.jobs, 2u);
}

TEST(Settings, Rejections) {
    EXPECT_THROW(settings_from(parse("colour = blue\n")), UsageError);
    EXPECT_THROW(settings_from(parse("mode = triple\n")), UsageError);
    EXPECT_THROW(settings_from(parse("backend = bert\n")), UsageError);
    EXPECT_THROW(settings_from(parse("window_days = 0\n")), UsageError);
    EXPECT_THROW(settings_from(parse("window_days = 1,3\n")), UsageError);
    EXPECT_THROW(settings_from(parse("epsilon = -1\n")), UsageError);
    EXPECT_THROW(settings_from(parse("phase1.pretrain.label_smoothing = 1.5\n")), UsageError);
    EXPECT_THROW(settings_from(parse("stance.unverified = drop\n")), UsageError);
    EXPECT_THROW(settings_from(parse("average = weighted\n")), UsageError);
}

TEST(IntList, Parsing) {
    EXPECT_EQ(parse_int_list("1, 3,5", "w"), (std::vector<int>{1, 3, 5}));
    EXPECT_TRUE(parse_int_list("", "w").empty());
    EXPECT_THROW(parse_int_list("1,x", "w"), UsageError);
    EXPECT_THROW(parse_int_list("-2", "w"), UsageError);
    EXPECT_THROW(parse_int_list("2.5", "w"), UsageError);
}

TEST(Manifest, ChecksumsAndJson) {
    rumor::testing::TempDir tmp;
    std::ofstream(tmp / "a.txt") << "abc";
    RunManifest m;
    m.command = "evaluate";
    m.add_corpus(tmp / "a.txt");
    m.add_backend(tmp / "none.model");
    const auto j = m.json();
    EXPECT_EQ(j["command"], "evaluate");
    const std::string sum = j["corpus_checksums"][(tmp / "a.txt").string()];
    EXPECT_EQ(sum, file_checksum(tmp / "a.txt"));
    EXPECT_EQ(sum.rfind("fnv1a64:", 0), 0u);
    EXPECT_EQ(j["backend_checksums"][(tmp / "none.model").string()], "missing");
}

TEST(Settings, ShippedConfigMatchesDefaults) {
    const auto shipped = settings_from(FlatConfig::load(std::filesystem::path(RUMOR_SOURCE_DIR) / "config" / "default.conf"));
    const auto defaults = settings_from(FlatConfig{});
    EXPECT_EQ(shipped.plan.phase1.pretrain, defaults.plan.phase1.pretrain);
    EXPECT_EQ(shipped.plan.phase1.finetune, defaults.plan.phase1.finetune);
    EXPECT_EQ(shipped.plan.phase1.per_class, defaults.plan.phase1.per_class);
    EXPECT_EQ(shipped.plan.phase21.pretrain, defaults.plan.phase21.pretrain);
    EXPECT_EQ(shipped.plan.phase21.finetune, defaults.plan.phase21.finetune);
    EXPECT_EQ(shipped.plan.phase22.pretrain, defaults.plan.phase22.pretrain);
    EXPECT_EQ(shipped.plan.phase22.finetune, defaults.plan.phase22.finetune);
    EXPECT_EQ(shipped.pipeline.entropy_epsilon, defaults.pipeline.entropy_epsilon);
    EXPECT_EQ(shipped.windows, defaults.windows);
}
