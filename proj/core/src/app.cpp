#include "aegis/app.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aegis/errors.hpp"
#include "aegis/evaluator.hpp"
#include "aegis/gateway.hpp"
#include "aegis/kb.hpp"
#include "aegis/orchestrator.hpp"
#include "aegis/prompts.hpp"
#include "aegis/util.hpp"
#include "aegis/validation.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace aegis {

namespace {

int parse_int(const std::string& value, const std::string& location) {
    try {
        std::size_t consumed = 0;
        const int parsed = std::stoi(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError(location + ": expected an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& value, const std::string& location) {
    try {
        std::size_t consumed = 0;
        const double parsed = std::stod(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError(location + ": expected a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& value, const std::string& location) {
    const std::string v = util::to_lower(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(location + ": expected a boolean, got '" + value + "'");
}

/// Path-valued keys assigned in a config must point at something that exists;
/// defaulted paths are resolved at use. Output directories are exempt (they
/// get created).
const std::vector<std::pair<std::string, std::string AppConfig::*>>& path_keys() {
    static const std::vector<std::pair<std::string, std::string AppConfig::*>> keys = {
        {"script", &AppConfig::script},
        {"replay", &AppConfig::replay},
        {"prompts_dir", &AppConfig::prompts_dir},
        {"rubrics_dir", &AppConfig::rubrics_dir},
        {"kb", &AppConfig::kb},
        {"validation_config", &AppConfig::validation_config},
    };
    return keys;
}

}  // namespace

void AppConfig::apply(const std::string& key, const std::string& value,
                      const std::string& location) {
    if (key == "backend") {
        if (value != "scripted" && value != "replay" && value != "http") {
            throw ConfigError(location + ": backend must be scripted, replay, or http");
        }
        backend = value;
    } else if (key == "script") {
        script = value;
    } else if (key == "replay") {
        replay = value;
    } else if (key == "endpoint") {
        endpoint = value;
    } else if (key == "model") {
        model = value;
    } else if (key == "topology") {
        topology = value;
    } else if (key == "prompt_version") {
        prompt_version = value;
    } else if (key == "max_rounds") {
        max_rounds = parse_int(value, location);
    } else if (key == "researcher_top_k") {
        researcher_top_k = parse_int(value, location);
    } else if (key == "stage_top_k") {
        stage_top_k = parse_int(value, location);
    } else if (key == "stop_on_clean") {
        stop_on_clean = parse_bool(value, location);
    } else if (key == "temperature") {
        temperature = parse_double(value, location);
    } else if (key == "max_tokens") {
        max_tokens = parse_int(value, location);
    } else if (key == "prompts_dir") {
        prompts_dir = value;
    } else if (key == "rubrics_dir") {
        rubrics_dir = value;
    } else if (key == "kb") {
        kb = value;
    } else if (key == "validation_config") {
        validation_config = value;
    } else if (key == "runs_dir") {
        runs_dir = value;
    } else if (key == "weight_blocking") {
        weight_blocking = parse_double(value, location);
    } else if (key == "weight_major") {
        weight_major = parse_double(value, location);
    } else if (key == "weight_minor") {
        weight_minor = parse_double(value, location);
    } else {
        throw ConfigError(location + ": unknown key '" + key + "'");
    }
}

AppConfig AppConfig::parse(const std::string& text, const std::string& origin) {
    AppConfig config;
    std::size_t line_number = 0;
    for (const auto& raw_line : util::split_lines(text)) {
        ++line_number;
        const std::string line = util::trim(raw_line);
        if (line.empty() || line.starts_with("#")) continue;
        const std::string location = origin + " line " + std::to_string(line_number);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(location + ": expected key=value");
        }
        const std::string key = util::trim(line.substr(0, eq));
        const std::string value = util::trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(location + ": empty key");
        }
        config.apply(key, value, location);
        for (const auto& [path_key, member] : path_keys()) {
            const std::string& path = config.*member;
            if (path_key == key && !path.empty() && !fs::exists(path)) {
                throw ConfigError(location + ": " + key + " path does not exist: " + path);
            }
        }
    }
    return config;
}

AppConfig AppConfig::load(const std::string& path) {
    return parse(util::read_file(path), path);
}

namespace {

std::unique_ptr<ChatBackend> make_backend(const AppConfig& config) {
    if (config.backend == "scripted") {
        if (config.script.empty()) {
            throw ConfigError("scripted backend requires a script file");
        }
        return ScriptedBackend::from_script_file(config.script);
    }
    if (config.backend == "replay") {
        if (config.replay.empty()) {
            throw ConfigError("replay backend requires a recorded transcript");
        }
        return std::make_unique<ReplayBackend>(
            Transcript::from_jsonl(util::read_file(config.replay)));
    }
    HttpBackendConfig http;
    http.base_url = config.endpoint;
    http.model = config.model;
    return std::make_unique<HttpBackend>(std::move(http));
}

ValidationConfig load_validation(const AppConfig& config) {
    if (config.validation_config.empty()) return ValidationConfig::defaults();
    return ValidationConfig::load(config.validation_config);
}

ScoreWeights score_weights(const AppConfig& config) {
    ScoreWeights weights;
    weights.blocking = config.weight_blocking;
    weights.major = config.weight_major;
    weights.minor = config.weight_minor;
    return weights;
}

void print_violations(const std::vector<Violation>& violations, std::ostream& out) {
    std::size_t entity_width = 6;
    for (const auto& v : violations) {
        entity_width = std::max(entity_width, v.entity_id.size());
    }
    for (const auto& v : violations) {
        out << std::left << std::setw(5) << to_string(v.rule_id) << std::setw(10)
            << to_string(v.severity) << std::setw(static_cast<int>(entity_width) + 2)
            << v.entity_id << v.message << "\n";
    }
    out << violations.size() << " violations\n";
}

struct ScoredDir {
    RunRecord record;
    std::optional<ScoreCard> card;
    std::string notice;  // set when unscored
};

/// Loads and scores each run directory. A run that cannot be scored (never
/// parsed, or the judge reply stayed malformed) is carried with a notice
/// instead of a card: missing, not zero.
std::vector<ScoredDir> score_run_dirs(const AppConfig& config,
                                      const std::vector<std::string>& run_dirs,
                                      ScoreMethod method) {
    std::vector<ScoredDir> scored;
    scored.reserve(run_dirs.size());

    JudgeRubric rubric;
    std::unique_ptr<ChatBackend> backend;
    if (method == ScoreMethod::judge) {
        rubric = JudgeRubric::load(config.rubrics_dir);
        backend = make_backend(config);
    }
    const ScoreWeights weights = score_weights(config);

    for (const auto& dir : run_dirs) {
        ScoredDir entry;
        entry.record = load_run_record(dir);
        if (entry.record.unparsed) {
            entry.notice = "run " + entry.record.run_id + " unscored: no parsed work product";
        } else if (method == ScoreMethod::rule) {
            entry.card = rule_score(entry.record.final_violations, weights);
        } else {
            try {
                entry.card = judge_score(entry.record.product, rubric, *backend);
            } catch (const JudgeFormatError& e) {
                entry.notice = "run " + entry.record.run_id + " unscored: " + e.what();
            }
        }
        scored.push_back(std::move(entry));
    }
    return scored;
}

ComparisonSummary summarize(const std::vector<ScoredDir>& scored) {
    std::vector<ScoredRun> runs;
    for (const auto& entry : scored) {
        if (!entry.card.has_value()) continue;
        runs.push_back({entry.record.topology_id, entry.record.prompt_version, *entry.card});
    }
    if (runs.empty()) {
        throw DomainError("no run produced a score");
    }
    return compare_runs(runs);
}

ScoreMethod parse_method(const std::string& method) {
    const auto parsed = score_method_from_string(method);
    if (!parsed) {
        throw ConfigError("method must be rule or judge, got '" + method + "'");
    }
    return *parsed;
}

std::string scorecard_json(const std::string& run_id, const ScoreCard& card) {
    json j;
    j["run_id"] = run_id;
    j["method"] = to_string(card.method);
    j["fsr_score"] = card.fsr_score;
    j["testcase_score"] = card.testcase_score;
    j["detail"] = card.detail;
    return j.dump(2) + "\n";
}

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int cmd_run(const AppConfig& config, const RunArgs& args, std::ostream& out,
            std::ostream& err) {
    return guarded(err, [&]() -> int {
        const auto topology_id = topology_from_string(config.topology);
        if (!topology_id) {
            throw ConfigError("unknown topology '" + config.topology + "'");
        }
        const auto version = prompt_version_from_string(config.prompt_version);
        if (!version) {
            throw ConfigError("unknown prompt version '" + config.prompt_version + "'");
        }
        const std::string requirement = util::read_file(args.requirement_path);

        const PromptRegistry registry = PromptRegistry::load(config.prompts_dir);
        const std::unique_ptr<ChatBackend> backend = make_backend(config);

        std::optional<KnowledgeBase> kb;
        if (!config.kb.empty()) {
            kb = KnowledgeBase::load(config.kb);
        }

        RunOptions options;
        options.run_id = args.run_id;
        options.runs_dir = config.runs_dir;
        options.reflection.max_rounds = config.max_rounds;
        options.reflection.researcher_top_k = config.researcher_top_k;
        options.reflection.stop_on_clean = config.stop_on_clean;
        options.validation = load_validation(config);
        options.kb = kb.has_value() ? &*kb : nullptr;
        options.stage_top_k = config.stage_top_k;
        options.temperature = config.temperature;
        options.max_tokens = config.max_tokens;

        const RunRecord record = run_pipeline(requirement, Topology::make(*topology_id),
                                              *version, registry, *backend, options);

        out << "run_id: " << record.run_id << "\n";
        if (record.unparsed) {
            out << "unparsed: no recognizable artifact tables\n";
        } else {
            out << "violations: " << record.final_violations.size() << "\n";
        }
        out << "run_dir: " << (fs::path(config.runs_dir) / record.run_id).string() << "\n";
        return 0;
    });
}

int cmd_validate(const AppConfig& config, const ValidateArgs& args, std::ostream& out,
                 std::ostream& err) {
    return guarded(err, [&]() -> int {
        const WorkProduct product =
            workproduct_from_json(util::read_file(args.workproduct_path));
        const std::vector<Violation> violations = validate(product, load_validation(config));
        print_violations(violations, out);
        return has_blocking(violations) ? 2 : 0;
    });
}

int cmd_evaluate(const AppConfig& config, const EvaluateArgs& args, std::ostream& out,
                 std::ostream& err) {
    return guarded(err, [&]() -> int {
        if (args.run_dirs.empty()) {
            throw ConfigError("evaluate requires at least one run directory");
        }
        const ScoreMethod method = parse_method(args.method);
        const std::vector<ScoredDir> scored = score_run_dirs(config, args.run_dirs, method);

        for (std::size_t i = 0; i < scored.size(); ++i) {
            const ScoredDir& entry = scored[i];
            if (!entry.card.has_value()) {
                err << entry.notice << "\n";
                continue;
            }
            const fs::path card_path =
                fs::path(args.run_dirs[i]) / ("scorecard." + to_string(method) + ".json");
            util::write_file_atomic(card_path.string(),
                                    scorecard_json(entry.record.run_id, *entry.card));
            out << entry.record.run_id << ": fsr " << util::format_fixed(entry.card->fsr_score, 1)
                << ", testcase " << util::format_fixed(entry.card->testcase_score, 1) << "\n";
        }

        const ComparisonSummary summary = summarize(scored);
        const fs::path csv_path = fs::path(args.out_dir) / "summary.csv";
        std::error_code ec;
        fs::create_directories(args.out_dir, ec);
        util::write_file_atomic(csv_path.string(), summary.to_csv());
        out << "summary: " << csv_path.string() << "\n";
        return 0;
    });
}

int cmd_compare(const AppConfig& config, const CompareArgs& args, std::ostream& out,
                std::ostream& err) {
    return guarded(err, [&]() -> int {
        if (args.run_dirs.empty()) {
            throw ConfigError("compare requires at least one run directory");
        }
        const ScoreMethod method = parse_method(args.method);
        const std::vector<ScoredDir> scored = score_run_dirs(config, args.run_dirs, method);
        for (const auto& entry : scored) {
            if (!entry.card.has_value()) err << entry.notice << "\n";
        }
        const ComparisonSummary summary = summarize(scored);
        out << summary.to_csv();
        if (!args.out_path.empty()) {
            util::write_file_atomic(args.out_path, summary.to_csv());
        }
        return 0;
    });
}

int cmd_kb_ingest(const AppConfig& config, const KbIngestArgs& args, std::ostream& out,
                  std::ostream& err) {
    (void)config;
    return guarded(err, [&]() -> int {
        if (args.out_path.empty()) {
            throw ConfigError("kb ingest requires an output path");
        }
        const KnowledgeBase kb = ingest_directory(args.corpus_dir, args.manifest);
        kb.save(args.out_path);
        out << "ingested " << kb.document_count() << " documents, " << kb.chunk_count()
            << " chunks -> " << args.out_path << "\n";
        return 0;
    });
}

}  // namespace aegis
