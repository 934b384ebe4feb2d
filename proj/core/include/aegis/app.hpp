#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aegis {

/// Settings shared by every subcommand, read from a key=value config file
/// and overridable per flag by the CLI layer. Unknown keys and dangling
/// paths are rejected at load with the offending location.
struct AppConfig {
    // backend selection
    std::string backend = "scripted";  // scripted | replay | http
    std::string script;                // scripted: response file (jsonl)
    std::string replay;                // replay: recorded transcript (jsonl)
    std::string endpoint;              // http: base URL (or AEGIS_BASE_URL)
    std::string model;                 // http: model name

    // pipeline shape
    std::string topology = "lite";
    std::string prompt_version = "v1";
    int max_rounds = 2;
    int researcher_top_k = 4;
    int stage_top_k = 4;
    bool stop_on_clean = true;
    double temperature = 0.0;
    int max_tokens = 4096;

    // resources
    std::string prompts_dir = "prompts";
    std::string rubrics_dir = "rubrics";
    std::string kb;                // serialized knowledge base index
    std::string validation_config; // rule/schema configuration file
    std::string runs_dir = "runs";

    // rule-score deduction weights
    double weight_blocking = 10.0;
    double weight_major = 5.0;
    double weight_minor = 2.0;

    static AppConfig load(const std::string& path);
    /// origin labels error messages ("cli.cfg line 3: ...").
    static AppConfig parse(const std::string& text, const std::string& origin);
    /// Applies one key=value pair; throws ConfigError on an unknown key or
    /// unusable value.
    void apply(const std::string& key, const std::string& value,
               const std::string& location);
};

struct RunArgs {
    std::string requirement_path;
    std::string run_id;  // generated when empty
};

struct ValidateArgs {
    std::string workproduct_path;
};

struct EvaluateArgs {
    std::vector<std::string> run_dirs;
    std::string method = "rule";
    std::string out_dir = ".";  // receives summary.csv
};

struct CompareArgs {
    std::vector<std::string> run_dirs;
    std::string method = "rule";
    std::string out_path;  // optional CSV destination
};

struct KbIngestArgs {
    std::string corpus_dir;
    std::string manifest = "manifest.tsv";  // relative to corpus_dir
    std::string out_path;
};

/// Exit codes: 0 success, 1 operational error, 2 blocking violations
/// (validate only). Violations found by `run` are data, not errors.
int cmd_run(const AppConfig& config, const RunArgs& args, std::ostream& out,
            std::ostream& err);
int cmd_validate(const AppConfig& config, const ValidateArgs& args, std::ostream& out,
                 std::ostream& err);
int cmd_evaluate(const AppConfig& config, const EvaluateArgs& args, std::ostream& out,
                 std::ostream& err);
int cmd_compare(const AppConfig& config, const CompareArgs& args, std::ostream& out,
                std::ostream& err);
int cmd_kb_ingest(const AppConfig& config, const KbIngestArgs& args, std::ostream& out,
                  std::ostream& err);

}  // namespace aegis
