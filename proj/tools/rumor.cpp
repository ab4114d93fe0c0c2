// rumor: ingest -> train -> classify / evaluate / ablate.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 model error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rumor/cli/config.hpp"
#include "rumor/cli/manifest.hpp"
#include "rumor/corpus/jsonl.hpp"
#include "rumor/corpus/semeval.hpp"

namespace fs = std::filesystem;
using namespace rumor;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kModel = 3 };

// Options shared by the commands that build a Settings object.
struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> epsilon;
    std::string window_days;
    std::string mode;
    std::string backend;
    std::optional<unsigned> jobs;
    std::string average;
    std::map<std::string, std::string> overrides;  // path flags layered over the file

    void attach(CLI::App* cmd, bool with_mode = true) {
        cmd->add_option("--config", config_path, "flat key = value config file");
        cmd->add_option("--seed", seed, "seed for sampling and backend initialization");
        cmd->add_option("--epsilon", epsilon, "entropy gate tolerance (unverified iff H >= 1 - epsilon)");
        cmd->add_option("--window-days", window_days, "reply window(s) in days, comma separated");
        if (with_mode) cmd->add_option("--mode", mode, "double | single_lie | single_agreement | inverse | all");
        cmd->add_option("--backend", backend, "reference | transformer");
        cmd->add_option("--jobs", jobs, "worker threads for batch classification");
        cmd->add_option("--average", average, "macro | micro precision/recall");
    }

    cli::FlatConfig flat() const {
        cli::FlatConfig c = config_path.empty() ? cli::FlatConfig{} : cli::FlatConfig::load(config_path);
        if (seed) c.set("seed", std::to_string(*seed));
        if (epsilon) {
            std::ostringstream s;
            s.precision(17);
            s << *epsilon;
            c.set("epsilon", s.str());
        }
        if (!backend.empty()) c.set("backend", backend);
        if (jobs) c.set("jobs", std::to_string(*jobs));
        if (!average.empty()) c.set("average", average);
        for (const auto& [k, v] : overrides)
            if (!v.empty()) c.set(k, v);
        return c;
    }
};

std::vector<Mode> parse_modes(const std::string& text) {
    if (text.empty()) return {Mode::Double};
    if (text == "all") return {kAllModes.begin(), kAllModes.end()};
    std::vector<Mode> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto m = parse_mode(corpus::detail::trim(item));
        if (!m) throw UsageError("unknown mode '" + item + "'");
        out.push_back(*m);
    }
    return out;
}

fs::path require_path(const fs::path& p, const std::string& key) {
    if (p.empty()) throw UsageError(key + " is not configured (set it in the config file or pass --" + key + ")");
    if (!fs::exists(p)) throw UsageError(key + " not found: " + p.string());
    return p;
}

std::vector<corpus::Conversation> load_corpus(const fs::path& path) { return corpus::load_conversations(path); }

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path.string());
    out << text;
}

std::string predictions_jsonl(const std::vector<VeracityPrediction>& preds) {
    std::string out;
    for (const auto& p : preds) out += to_json(p).dump() + "\n";
    return out;
}

void record_config(cli::RunManifest& m, const cli::FlatConfig& flat) {
    for (const auto& [k, v] : flat.values()) m.config[k] = v;
}

// ---------------------------------------------------------------- ingest

int cmd_ingest(const fs::path& input, const fs::path& output, const std::string& labels, bool lenient) {
    corpus::LoadOptions options;
    options.drop_missing_replies = lenient;
    std::optional<corpus::LabelKey> key;
    if (!labels.empty()) key = corpus::load_label_key(labels);
    const auto convs = corpus::load_split(input, options, key ? &*key : nullptr);
    corpus::save_conversations(output, convs);

    std::size_t replies = 0, pairs = 0, labeled = 0;
    for (const auto& c : convs) {
        replies += c.replies.size();
        pairs += c.primary_count();
        labeled += c.gold_label.has_value();
    }
    std::cout << convs.size() << " threads, " << replies << " replies, " << pairs << " primary pairs, " << labeled
              << " labeled\n";
    return kOk;
}

// ---------------------------------------------------------------- train

TrainingCorpora load_training_corpora(const cli::Settings& s, const std::string& phase, bool all_observations) {
    TrainingCorpora data;
    data.train = load_corpus(require_path(s.train_corpus, "train_corpus"));
    if (phase == "1") data.hedge = corpus::load_hedge_corpus(require_path(s.hedge_corpus, "hedge_corpus"));
    if (phase == "2-1") {
        data.deception = corpus::load_deception_corpus(require_path(s.deception_corpus, "deception_corpus"));
        if (!all_observations) require_path(s.pipeline.certainty_model, "certainty_model");
    }
    if (phase == "2-2") data.agreement = corpus::load_agreement_corpus(require_path(s.agreement_corpus, "agreement_corpus"));
    return data;
}

nlohmann::ordered_json recipe_json(const classifier::TrainingRecipe& r) {
    return {{"epochs", r.epochs},
            {"batch_size", r.batch_size},
            {"learning_rate", r.learning_rate},
            {"label_smoothing", r.label_smoothing},
            {"optimizer", r.optimizer}};
}

int cmd_train(const CommonOptions& common, const std::string& phase, std::string output, bool all_observations) {
    if (phase != "1" && phase != "2-1" && phase != "2-2") throw UsageError("--phase must be 1, 2-1 or 2-2");
    const auto flat = common.flat();
    const auto s = cli::settings_from(flat);

    cli::RunManifest manifest;
    manifest.command = "train --phase " + phase + (all_observations ? " --all-observations" : "");
    manifest.started_at = cli::now_utc();
    record_config(manifest, flat);

    const auto data = load_training_corpora(s, phase, all_observations);
    manifest.add_corpus(s.train_corpus);

    std::unique_ptr<classifier::ClassifierBackend> model;
    if (phase == "1") {
        if (output.empty()) output = s.pipeline.certainty_model.string();
        channels::Phase1Summary summary;
        model = train_certainty_model(s.plan, data, &summary);
        manifest.add_corpus(s.hedge_corpus);
        manifest.details["pretrain_recipe"] = recipe_json(s.plan.phase1.pretrain);
        manifest.details["finetune_recipe"] = recipe_json(s.plan.phase1.finetune);
        manifest.details["per_class"] = s.plan.phase1.per_class;
        manifest.details["pretrain_size"] = summary.pretrain_size;
        manifest.details["self_labeled"] = {{"certain", summary.self_labeled_certain},
                                            {"uncertain", summary.self_labeled_uncertain}};
        manifest.details["finetune_size"] = summary.finetune_size;
    } else if (phase == "2-1") {
        if (output.empty()) output = (all_observations ? s.lie_all_model : s.pipeline.lie_model).string();
        std::vector<std::string> warnings;
        std::optional<channels::AssignmentMap> assignments;
        if (!all_observations) {
            const auto certainty = classifier::load_model(s.pipeline.certainty_model, s.plan.backend);
            assignments = channels::assign_all(data.train, *certainty);
            manifest.add_backend(s.pipeline.certainty_model);
        }
        model = train_lie_model(s.plan, data, assignments ? &*assignments : nullptr, &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
        manifest.add_corpus(s.deception_corpus);
        manifest.details["pretrain_recipe"] = recipe_json(s.plan.phase21.pretrain);
        manifest.details["finetune_recipe"] = recipe_json(s.plan.phase21.finetune);
        manifest.details["finetune_filter"] = all_observations ? "all true/false threads" : "phase-1 certain true/false threads";
        manifest.details["warnings"] = warnings;
    } else {
        if (output.empty()) output = s.pipeline.stance_model.string();
        model = train_stance_model(s.plan, data);
        manifest.add_corpus(s.agreement_corpus);
        manifest.details["pretrain_recipe"] = recipe_json(s.plan.phase22.pretrain);
        manifest.details["finetune_recipe"] = recipe_json(s.plan.phase22.finetune);
        manifest.details["stance_unverified"] = s.plan.stance_mapping.skip_unverified ? "skip" : "none";
    }
    classifier::save_model(*model, output);
    manifest.add_backend(output);
    manifest.finished_at = cli::now_utc();
    manifest.save(cli::manifest_path_for(output));
    std::cout << "wrote " << output << '\n';
    return kOk;
}

// ---------------------------------------------------------------- classify / evaluate

struct LoadedModels {
    std::unique_ptr<classifier::ClassifierBackend> certainty, lie, lie_all, stance;

    Backends for_mode(Mode mode) const {
        return {certainty.get(), mode == Mode::SingleLie && lie_all ? lie_all.get() : lie.get(), stance.get()};
    }
};

LoadedModels load_models(const cli::Settings& s, const std::vector<Mode>& modes, bool lie_on_all,
                         cli::RunManifest& manifest) {
    LoadedModels m;
    bool phase1 = false, lie = lie_on_all, lie_all = false, stance = false;
    for (Mode mode : modes) {
        phase1 = phase1 || uses_phase1(mode);
        lie = lie || mode == Mode::Double || mode == Mode::Inverse;
        lie_all = lie_all || mode == Mode::SingleLie;
        stance = stance || mode != Mode::SingleLie;
    }
    auto load = [&](const fs::path& p) {
        manifest.add_backend(p);
        return classifier::load_model(p, s.plan.backend);
    };
    if (phase1) m.certainty = load(s.pipeline.certainty_model);
    if (lie) m.lie = load(s.pipeline.lie_model);
    if (lie_all) {
        // The single-lie ablation prefers a detector fine-tuned on all observations.
        if (fs::exists(s.lie_all_model)) m.lie_all = load(s.lie_all_model);
        else if (!m.lie) m.lie = load(s.pipeline.lie_model);
    }
    if (stance) m.stance = load(s.pipeline.stance_model);
    return m;
}

int cmd_classify(const CommonOptions& common, const fs::path& corpus_path, fs::path output, bool lie_all) {
    auto flat = common.flat();
    if (!common.mode.empty()) flat.set("mode", common.mode);
    if (!common.window_days.empty()) flat.set("window_days", common.window_days);
    if (lie_all) flat.set("lie_on_all", "true");
    const auto s = cli::settings_from(flat);

    cli::RunManifest manifest;
    manifest.command = "classify";
    manifest.started_at = cli::now_utc();
    record_config(manifest, flat);
    manifest.add_corpus(corpus_path);

    const auto convs = load_corpus(corpus_path);
    const auto models = load_models(s, {s.pipeline.mode}, s.pipeline.lie_on_all, manifest);
    const auto preds = run_batch(convs, s.pipeline, models.for_mode(s.pipeline.mode));

    const std::string text = predictions_jsonl(preds);
    if (output.empty()) {
        std::cout << text;
    } else {
        write_text(output, text);
        manifest.finished_at = cli::now_utc();
        manifest.save(cli::manifest_path_for(output));
        std::cerr << "wrote " << preds.size() << " predictions to " << output << '\n';
    }
    return kOk;
}

void write_report(const evaluation::ReportGrid& grid, const std::vector<evaluation::RunResult>& runs,
                  const fs::path& out_dir, cli::RunManifest& manifest) {
    const std::string table = grid.table();
    std::cout << table;
    if (out_dir.empty()) return;
    write_text(out_dir / "report.txt", table);
    write_text(out_dir / "report.json", grid.json().dump(2) + "\n");
    for (const auto& run : runs)
        write_text(out_dir / ("predictions-" + run.config.label() + ".jsonl"), predictions_jsonl(run.predictions));
    manifest.finished_at = cli::now_utc();
    manifest.save(out_dir / "manifest.json");
}

int cmd_evaluate(const CommonOptions& common, const fs::path& corpus_path, const fs::path& out_dir) {
    auto flat = common.flat();
    const auto s = cli::settings_from(flat);
    const auto modes = parse_modes(common.mode);

    cli::RunManifest manifest;
    manifest.command = "evaluate";
    manifest.started_at = cli::now_utc();
    record_config(manifest, flat);
    manifest.config["modes"] = common.mode.empty() ? "double" : common.mode;
    manifest.config["window_days"] = common.window_days;
    manifest.add_corpus(corpus_path);

    const auto convs = load_corpus(corpus_path);
    const auto models = load_models(s, modes, s.pipeline.lie_on_all, manifest);

    const auto golds = evaluation::gold_labels(convs);
    if (golds.empty()) std::cerr << "notice: corpus has no gold labels; emitting predictions without metrics\n";
    else if (golds.size() != convs.size())
        throw IdMismatch(std::to_string(convs.size() - golds.size()) + " threads lack gold labels");

    std::vector<evaluation::RunResult> runs;
    auto run_one = [&](PipelineConfig cfg) {
        evaluation::RunResult r;
        r.predictions = run_batch(convs, cfg, models.for_mode(cfg.mode));
        r.config = std::move(cfg);
        if (!golds.empty()) r.golds = golds;
        runs.push_back(std::move(r));
    };
    for (Mode mode : modes) {
        PipelineConfig cfg = s.pipeline;
        cfg.mode = mode;
        run_one(cfg);
    }
    for (int days : cli::parse_int_list(common.window_days, "--window-days")) {
        PipelineConfig cfg = s.pipeline;
        cfg.mode = Mode::Double;
        cfg.reply_window_days = days;
        run_one(cfg);
    }
    const auto grid = evaluation::report_grid(runs, s.averaging);
    write_report(grid, runs, out_dir, manifest);
    return kOk;
}

// ---------------------------------------------------------------- ablate

int cmd_ablate(const CommonOptions& common, const fs::path& out_dir) {
    auto flat = common.flat();
    if (!common.window_days.empty()) flat.set("ablate.windows", common.window_days);
    const auto s = cli::settings_from(flat);

    cli::RunManifest manifest;
    manifest.command = "ablate";
    manifest.started_at = cli::now_utc();
    record_config(manifest, flat);

    TrainingCorpora data;
    data.train = load_corpus(require_path(s.train_corpus, "train_corpus"));
    data.hedge = corpus::load_hedge_corpus(require_path(s.hedge_corpus, "hedge_corpus"));
    data.deception = corpus::load_deception_corpus(require_path(s.deception_corpus, "deception_corpus"));
    data.agreement = corpus::load_agreement_corpus(require_path(s.agreement_corpus, "agreement_corpus"));
    const auto test = load_corpus(require_path(s.test_corpus, "test_corpus"));
    for (const auto* p : {&s.train_corpus, &s.test_corpus, &s.hedge_corpus, &s.deception_corpus, &s.agreement_corpus})
        manifest.add_corpus(*p);

    const auto models = train_models(s.plan, data);
    for (const auto& w : models.warnings) std::cerr << "warning: " << w << '\n';
    classifier::save_model(*models.certainty, s.pipeline.certainty_model);
    classifier::save_model(*models.lie, s.pipeline.lie_model);
    classifier::save_model(*models.lie_all, s.lie_all_model);
    classifier::save_model(*models.stance, s.pipeline.stance_model);
    for (const auto* p : {&s.pipeline.certainty_model, &s.pipeline.lie_model, &s.lie_all_model, &s.pipeline.stance_model})
        manifest.add_backend(*p);

    GridSpec spec;
    spec.base = s.pipeline;
    spec.windows = s.windows;
    const auto runs = run_grid(spec, models, test);
    const auto grid = evaluation::report_grid(runs, s.averaging);
    manifest.details["phase1_self_labels"] = {{"certain", models.phase1.self_labeled_certain},
                                              {"uncertain", models.phase1.self_labeled_uncertain}};
    write_report(grid, runs, out_dir, manifest);
    return kOk;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage: return kUsage;
        case ErrorKind::Data: return kData;
        case ErrorKind::Model: return kModel;
    }
    return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Double-channel rumor veracity pipeline"};
    app.require_subcommand(1);

    std::string input, output, labels, corpus_path, phase, out_dir;
    bool lenient = false, all_observations = false, lie_all = false;
    CommonOptions common;

    auto* ingest = app.add_subcommand("ingest", "convert a SemEval-2019 Task 7 tree into conversation JSONL");
    ingest->add_option("--input", input, "directory holding conversation folders")->required();
    ingest->add_option("--output", output, "output JSONL path")->required();
    ingest->add_option("--labels", labels, "task label key file (subtaskbenglish)");
    ingest->add_flag("--lenient", lenient, "drop structure entries whose reply file is missing");

    auto* train = app.add_subcommand("train", "train one phase's classifier");
    train->add_option("--phase", phase, "1 | 2-1 | 2-2")->required();
    train->add_option("--output", output, "model path (defaults to the configured model path)");
    train->add_flag("--all-observations", all_observations,
                    "phase 2-1: fine-tune on every true/false thread (single-channel ablation)");
    common.attach(train, false);
    std::string train_corpus, hedge, deception, agreement, certainty_model;
    train->add_option("--train-corpus", train_corpus, "ingested training JSONL");
    train->add_option("--hedge-corpus", hedge, "certainty pretraining corpus");
    train->add_option("--deception-corpus", deception, "deception pretraining corpus");
    train->add_option("--agreement-corpus", agreement, "agreement-pair pretraining corpus");
    train->add_option("--certainty-model", certainty_model, "phase 1 model used to route training threads");

    auto* classify = app.add_subcommand("classify", "predict veracity for every conversation");
    classify->add_option("--corpus", corpus_path, "conversation JSONL")->required();
    classify->add_option("--output", output, "prediction JSONL (stdout if omitted)");
    classify->add_flag("--all", lie_all, "also run the lie detector on threads routed to agreement");
    common.attach(classify);

    auto* evaluate = app.add_subcommand("evaluate", "score one or more configurations against gold labels");
    evaluate->add_option("--corpus", corpus_path, "labeled conversation JSONL")->required();
    evaluate->add_option("--out-dir", out_dir, "write report.txt, report.json, predictions and manifest here");

    auto* ablate = app.add_subcommand("ablate", "train every model and run the full mode/window grid");
    ablate->add_option("--out-dir", out_dir, "write report.txt, report.json, predictions and manifest here");

    // evaluate and ablate share the common options; attach after creation.
    common.attach(evaluate);
    common.attach(ablate, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*ingest) return cmd_ingest(input, output, labels, lenient);
        if (*train) {
            common.overrides = {{"train_corpus", train_corpus},
                                {"hedge_corpus", hedge},
                                {"deception_corpus", deception},
                                {"agreement_corpus", agreement},
                                {"certainty_model", certainty_model}};
            return cmd_train(common, phase, output, all_observations);
        }
        if (*classify) return cmd_classify(common, corpus_path, output, lie_all);
        if (*evaluate) return cmd_evaluate(common, corpus_path, out_dir);
        if (*ablate) return cmd_ablate(common, out_dir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
    return kUsage;
}
