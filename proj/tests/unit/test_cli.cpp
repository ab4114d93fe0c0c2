#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "json.hpp"
#include "synthetic.hpp"
#include "temp_dir.hpp"

using namespace rumor;
namespace fx = rumor::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;  // stdout and stderr interleaved
};

Result run(const std::string& args, const fs::path& scratch) {
    const fs::path log = scratch / "cli.log";
    const std::string cmd = std::string(RUMOR_CLI_PATH) + " " + args + " > '" + log.string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, {std::istreambuf_iterator<char>(in), {}}};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// Raw SemEval trees, pretraining files and a config pointing at all of them.
struct Workspace {
    fx::TempDir tmp;
    fs::path config;

    Workspace() {
        const auto data = fx::make_synthetic({.seed = 7, .n_train = 60, .n_test = 30, .n_hedge = 200,
                                              .n_deception = 200, .n_agreement = 200});
        fx::write_semeval(tmp / "raw" / "train", data.corpora.train, tmp / "raw" / "train-key.json");
        fx::write_semeval(tmp / "raw" / "test", data.test, tmp / "raw" / "test-key.json");
        const auto files = fx::write_pretrain_files(tmp / "pretrain", data.corpora);
        config = tmp / "run.conf";
        std::ofstream(config) << "seed = 7\n"
                              << "train_corpus = " << (tmp / "train.jsonl").string() << "\n"
                              << "test_corpus = " << (tmp / "test.jsonl").string() << "\n"
                              << "hedge_corpus = " << files.hedge.string() << "\n"
                              << "deception_corpus = " << files.deception.string() << "\n"
                              << "agreement_corpus = " << files.agreement.string() << "\n"
                              << "certainty_model = " << (tmp / "models" / "certainty.model").string() << "\n"
                              << "lie_model = " << (tmp / "models" / "lie.model").string() << "\n"
                              << "lie_all_model = " << (tmp / "models" / "lie_all.model").string() << "\n"
                              << "stance_model = " << (tmp / "models" / "stance.model").string() << "\n";
    }

    fs::path operator/(const std::string& rel) const { return tmp / rel; }

    void ingest() {
        for (const char* split : {"train", "test"}) {
            const auto r = run(std::string("ingest --input ") + q(tmp / "raw" / split) + " --output " +
                                   q(tmp / (std::string(split) + ".jsonl")) + " --labels " +
                                   q(tmp / "raw" / (std::string(split) + "-key.json")),
                               tmp.path());
            ASSERT_EQ(r.code, 0) << r.out;
        }
    }

    void train_all() {
        for (const char* phase : {"1", "2-1", "2-2"}) {
            const auto r = run(std::string("train --phase ") + phase + " --config " + q(config), tmp.path());
            ASSERT_EQ(r.code, 0) << r.out;
        }
        const auto r = run("train --phase 2-1 --all-observations --config " + q(config), tmp.path());
        ASSERT_EQ(r.code, 0) << r.out;
    }
};

}  // namespace

TEST(Cli, UsageErrors) {
    fx::TempDir tmp;
    EXPECT_EQ(run("", tmp.path()).code, 1);
    EXPECT_EQ(run("frobnicate", tmp.path()).code, 1);
    EXPECT_EQ(run("train", tmp.path()).code, 1);
    EXPECT_EQ(run("train --phase 3", tmp.path()).code, 1);
    EXPECT_EQ(run("--help", tmp.path()).code, 0);
}

TEST(Cli, IngestEmptyDirectory) {
    fx::TempDir tmp;
    fs::create_directories(tmp / "empty");
    const auto r = run("ingest --input " + q(tmp / "empty") + " --output " + q(tmp / "out.jsonl"), tmp.path());
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("0 threads"), std::string::npos) << r.out;
    EXPECT_TRUE(fs::exists(tmp / "out.jsonl"));
    EXPECT_TRUE(slurp(tmp / "out.jsonl").empty());
}

TEST(Cli, IngestCorruptStructureNamesFile) {
    fx::TempDir tmp;
    const auto data = fx::make_synthetic({.seed = 2, .n_train = 3, .n_test = 0});
    fx::write_semeval(tmp / "raw", data.corpora.train, tmp / "key.json");
    const auto victim = tmp / "raw" / data.corpora.train[1].thread.id / "structure.json";
    ASSERT_TRUE(fs::exists(victim));
    fx::write_file(victim, "{broken");
    const auto r = run("ingest --input " + q(tmp / "raw") + " --output " + q(tmp / "out.jsonl"), tmp.path());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find(victim.string()), std::string::npos) << r.out;
}

TEST(Cli, TrainMissingCorpusIsNamed) {
    Workspace ws;
    ws.ingest();
    std::ofstream(ws / "bare.conf") << "train_corpus = " << (ws / "train.jsonl").string() << "\n";
    const auto r = run("train --phase 2-1 --all-observations --config " + q(ws / "bare.conf") + " --output " +
                           q(ws / "x.model"),
                       ws.tmp.path());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("deception_corpus"), std::string::npos) << r.out;

    const auto r2 = run("train --phase 2-1 --config " + q(ws / "bare.conf") + " --deception-corpus " +
                            q(ws / "pretrain" / "deception.csv") + " --certainty-model " + q(ws / "absent.model") +
                            " --output " + q(ws / "x.model"),
                        ws.tmp.path());
    EXPECT_EQ(r2.code, 1) << r2.out;
    EXPECT_NE(r2.out.find("certainty_model"), std::string::npos) << r2.out;
}

TEST(Cli, TrainIsDeterministic) {
    Workspace ws;
    ws.ingest();
    for (const char* name : {"a.model", "b.model"}) {
        const auto r = run("train --phase 1 --config " + q(ws.config) + " --output " + q(ws / name), ws.tmp.path());
        ASSERT_EQ(r.code, 0) << r.out;
    }
    EXPECT_EQ(slurp(ws / "a.model"), slurp(ws / "b.model"));
    const auto manifest = nlohmann::json::parse(slurp(ws / "a.model.manifest.json"));
    EXPECT_EQ(manifest["details"]["per_class"], 21);
    EXPECT_EQ(manifest["details"]["finetune_recipe"]["label_smoothing"], 0.2);
    EXPECT_EQ(manifest["details"]["finetune_size"], 42);
}

TEST(Cli, EndToEndEvaluateAndClassify) {
    Workspace ws;
    ws.ingest();
    ws.train_all();

    const auto e = run("evaluate --config " + q(ws.config) + " --corpus " + q(ws / "test.jsonl") +
                           " --mode all --window-days 1,3 --out-dir " + q(ws / "eval1"),
                       ws.tmp.path());
    ASSERT_EQ(e.code, 0) << e.out;
    for (const char* f : {"report.txt", "report.json", "manifest.json", "predictions-double.jsonl",
                          "predictions-inverse.jsonl", "predictions-double@3d.jsonl"})
        EXPECT_TRUE(fs::exists(ws / "eval1" / f)) << f;
    const auto report = nlohmann::json::parse(slurp(ws / "eval1" / "report.json"));
    EXPECT_EQ(report["runs"].size(), 6u);
    EXPECT_FALSE(report["runs"][0]["metrics"].is_null());

    // A second run reproduces predictions and report byte for byte.
    const auto again = run("evaluate --config " + q(ws.config) + " --corpus " + q(ws / "test.jsonl") +
                               " --mode all --window-days 1,3 --out-dir " + q(ws / "eval2"),
                           ws.tmp.path());
    ASSERT_EQ(again.code, 0) << again.out;
    for (const char* f : {"report.txt", "report.json", "predictions-double.jsonl", "predictions-double@1d.jsonl"})
        EXPECT_EQ(slurp(ws / "eval1" / f), slurp(ws / "eval2" / f)) << f;

    const auto c = run("classify --config " + q(ws.config) + " --corpus " + q(ws / "test.jsonl") + " --all --output " +
                           q(ws / "preds.jsonl"),
                       ws.tmp.path());
    ASSERT_EQ(c.code, 0) << c.out;
    std::ifstream in(ws / "preds.jsonl");
    std::size_t n = 0;
    for (std::string line; std::getline(in, line); ++n) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_TRUE(j.contains("lie_evidence"));
    }
    EXPECT_EQ(n, 30u);
}

TEST(Cli, EvaluateUnlabeledCorpus) {
    Workspace ws;
    ws.ingest();
    ws.train_all();
    const auto r = run("ingest --input " + q(ws / "raw" / "test") + " --output " + q(ws / "unlabeled.jsonl"),
                       ws.tmp.path());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto e = run("evaluate --config " + q(ws.config) + " --corpus " + q(ws / "unlabeled.jsonl") + " --out-dir " +
                           q(ws / "eval"),
                       ws.tmp.path());
    ASSERT_EQ(e.code, 0) << e.out;
    EXPECT_NE(e.out.find("no gold labels"), std::string::npos) << e.out;
    const auto report = nlohmann::json::parse(slurp(ws / "eval" / "report.json"));
    EXPECT_TRUE(report["runs"][0]["metrics"].is_null());
    EXPECT_TRUE(fs::exists(ws / "eval" / "predictions-double.jsonl"));
}

TEST(Cli, EvaluateWithoutModelsIsModelError) {
    Workspace ws;
    ws.ingest();
    const auto e = run("evaluate --config " + q(ws.config) + " --corpus " + q(ws / "test.jsonl"), ws.tmp.path());
    EXPECT_EQ(e.code, 3) << e.out;
}

TEST(Cli, AblateWritesGrid) {
    Workspace ws;
    ws.ingest();
    const auto r = run("ablate --config " + q(ws.config) + " --window-days 1,5 --out-dir " + q(ws / "ab"), ws.tmp.path());
    ASSERT_EQ(r.code, 0) << r.out;
    const std::string table = slurp(ws / "ab" / "report.txt");
    for (const char* row : {"double", "single_lie", "single_agreement", "inverse", "double@1d", "double@5d"})
        EXPECT_NE(table.find(row), std::string::npos) << row;
    EXPECT_TRUE(fs::exists(ws / "models" / "lie_all.model"));
}
