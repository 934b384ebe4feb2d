#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "aegis/app.hpp"
#include "aegis/errors.hpp"

namespace {

/// Flags are collected as (key, value) pairs and applied over the config
/// file after parsing, so flag-vs-file precedence is independent of the
/// order CLI11 fires callbacks in.
struct Overrides {
    std::vector<std::pair<std::string, std::string>> pairs;

    void bind(CLI::App* cmd, const std::string& flag, const std::string& key,
              const std::string& help) {
        cmd->add_option_function<std::string>(
            flag, [this, key](const std::string& value) { pairs.emplace_back(key, value); },
            help);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"role-driven pipeline for automotive safety work products"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key=value settings file")
        ->check(CLI::ExistingFile);

    Overrides overrides;
    auto bind_backend_flags = [&](CLI::App* cmd) {
        overrides.bind(cmd, "--backend", "backend", "scripted, replay, or http");
        overrides.bind(cmd, "--script", "script", "scripted backend response file");
        overrides.bind(cmd, "--replay", "replay", "recorded transcript to replay");
        overrides.bind(cmd, "--endpoint", "endpoint", "HTTP backend base URL");
        overrides.bind(cmd, "--model", "model", "HTTP backend model name");
    };

    // run
    auto* run = app.add_subcommand("run", "execute the pipeline for one requirement");
    aegis::RunArgs run_args;
    run->add_option("--requirement", run_args.requirement_path, "requirement text file")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--run-id", run_args.run_id, "fixed run id (generated when absent)");
    bind_backend_flags(run);
    overrides.bind(run, "--topology", "topology", "lite, pro, or max");
    overrides.bind(run, "--prompt-version", "prompt_version", "v1, v2, or v3");
    overrides.bind(run, "--kb", "kb", "serialized knowledge base index");
    overrides.bind(run, "--runs-dir", "runs_dir", "directory receiving run outputs");
    overrides.bind(run, "--prompts-dir", "prompts_dir", "role prompt directory");
    overrides.bind(run, "--validation-config", "validation_config", "rule configuration file");
    overrides.bind(run, "--max-rounds", "max_rounds", "reflection round cap");

    // validate
    auto* validate = app.add_subcommand("validate", "check one workproduct.json");
    aegis::ValidateArgs validate_args;
    validate->add_option("workproduct", validate_args.workproduct_path, "workproduct.json path")
        ->required()
        ->check(CLI::ExistingFile);
    overrides.bind(validate, "--validation-config", "validation_config",
                   "rule configuration file");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "score run directories");
    aegis::EvaluateArgs evaluate_args;
    evaluate->add_option("runs", evaluate_args.run_dirs, "run directories")->required();
    evaluate->add_option("--method", evaluate_args.method, "rule or judge");
    evaluate->add_option("--out", evaluate_args.out_dir, "directory receiving summary.csv");
    bind_backend_flags(evaluate);
    overrides.bind(evaluate, "--rubrics-dir", "rubrics_dir", "judge rubric directory");

    // compare
    auto* compare = app.add_subcommand("compare", "summarize scores across runs");
    aegis::CompareArgs compare_args;
    compare->add_option("runs", compare_args.run_dirs, "run directories")->required();
    compare->add_option("--method", compare_args.method, "rule or judge");
    compare->add_option("--out", compare_args.out_path, "also write the CSV here");
    bind_backend_flags(compare);
    overrides.bind(compare, "--rubrics-dir", "rubrics_dir", "judge rubric directory");

    // kb ingest
    auto* kb = app.add_subcommand("kb", "knowledge base maintenance");
    kb->require_subcommand(1);
    auto* ingest = kb->add_subcommand("ingest", "index a document directory");
    aegis::KbIngestArgs ingest_args;
    ingest->add_option("--corpus", ingest_args.corpus_dir, "directory of .txt/.md documents")
        ->required()
        ->check(CLI::ExistingDirectory);
    ingest->add_option("--manifest", ingest_args.manifest,
                       "manifest file name inside the corpus directory");
    ingest->add_option("--out", ingest_args.out_path, "index output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        aegis::AppConfig config =
            config_path.empty() ? aegis::AppConfig{} : aegis::AppConfig::load(config_path);
        for (const auto& [key, value] : overrides.pairs) {
            config.apply(key, value, "flag --" + key);
        }

        if (run->parsed()) return aegis::cmd_run(config, run_args, std::cout, std::cerr);
        if (validate->parsed()) {
            return aegis::cmd_validate(config, validate_args, std::cout, std::cerr);
        }
        if (evaluate->parsed()) {
            return aegis::cmd_evaluate(config, evaluate_args, std::cout, std::cerr);
        }
        if (compare->parsed()) {
            return aegis::cmd_compare(config, compare_args, std::cout, std::cerr);
        }
        if (kb->parsed() && ingest->parsed()) {
            return aegis::cmd_kb_ingest(config, ingest_args, std::cout, std::cerr);
        }
    } catch (const aegis::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
