#include "aegis/orchestrator.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "aegis/errors.hpp"
#include "aegis/util.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace aegis {

namespace {

constexpr int kMaxRoundsCap = 8;

const std::vector<std::string> kSafetyRoles = {"fusa_manager", "fusa_expert", "vv_engineer"};

std::string generate_run_id() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t secs = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char stamp[80];  // sized for the widest int expansions the format allows
    std::snprintf(stamp, sizeof(stamp), "%04d%02d%02dT%02d%02d%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    std::uint64_t state = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(now.time_since_epoch()).count());
    const std::uint64_t salt = util::next_bounded(state, 0xffff);
    char suffix[8];
    std::snprintf(suffix, sizeof(suffix), "%04llx", static_cast<unsigned long long>(salt));
    return std::string("run-") + stamp + "-" + suffix;
}

/// Researcher queries are content-derived: table headers and markdown
/// headings of the role's current output, then the requirement text.
std::string build_researcher_query(const std::string& output, const std::string& requirement) {
    std::string query;
    ParseReport scratch;
    for (const auto& table : extract_tables(output, scratch)) {
        for (const auto& cell : table.header) {
            query += cell;
            query.push_back(' ');
        }
    }
    for (const auto& line : util::split_lines(output)) {
        const std::string t = util::trim(line);
        if (t.starts_with("#")) {
            query += util::trim(t.substr(t.find_first_not_of('#')));
            query.push_back(' ');
        }
    }
    query += requirement;
    return query;
}

std::string stage_task_directive(const std::string& role_id) {
    if (role_id == "fusa_manager") {
        return "Produce the complete safety planning now, following your output format "
               "exactly.";
    }
    if (role_id == "fusa_expert") {
        return "Review the safety planning above and publish the corrected, complete "
               "version now, following your output format exactly.";
    }
    return "Produce the complete test case table for every FSR above now, following "
           "your output format exactly.";
}

/// Prefixes the failure context while keeping the error type, so callers
/// can still tell an exhausted script from a backend fault.
std::string run_completion(PipelineState& state, const CompletionRequest& request,
                           const std::string& context) {
    try {
        return complete(*state.backend, request, state.transcript);
    } catch (const ScriptExhaustedError& e) {
        throw ScriptExhaustedError(context + ": " + e.what());
    } catch (const BackendError& e) {
        throw BackendError(context + ": " + e.what(), e.status, e.attempts);
    }
}

void run_stage(PipelineState& state, const std::string& role_id) {
    PromptContext ctx;
    ctx.requirement = state.requirement;
    ctx.tag = role_id + ".stage";
    ctx.task_directive = stage_task_directive(role_id);

    if (role_id == "fusa_expert") {
        const std::string* manager = state.find_output("fusa_manager");
        if (manager) ctx.upstream.emplace_back("fusa_manager", *manager);
        ctx.required_upstream = {"fusa_manager"};
    } else if (role_id == "vv_engineer") {
        // The expert's corrected planning supersedes the manager's.
        const std::string source_role = state.safety_source_role();
        if (const std::string* source = state.find_output(source_role)) {
            ctx.upstream.emplace_back(source_role, *source);
        }
        ctx.required_upstream = {source_role};
    }

    if (state.version >= PromptVersion::v2 && state.kb != nullptr) {
        ctx.retrieval = state.kb->retrieve(state.requirement, state.stage_top_k);
    }

    const RoleSpec& spec = state.registry->role(state.version, role_id);
    const RenderedPrompt prompt = render_role_prompt(spec, state.version, ctx);

    CompletionRequest request;
    request.messages = prompt.messages;
    request.temperature = state.temperature;
    request.max_tokens = state.max_tokens;
    request.tag = prompt.tag;

    state.set_output(role_id, run_completion(state, request, "stage " + role_id));
}

RoundOutcome evaluate_current(PipelineState& state, ParseReport& into_report, WorkProduct* product) {
    std::vector<std::pair<std::string, std::string>> sources;
    const std::string safety_role = state.safety_source_role();
    if (const std::string* safety = state.find_output(safety_role)) {
        sources.emplace_back(safety_role, *safety);
    }
    if (const std::string* tests = state.find_output("vv_engineer")) {
        sources.emplace_back("vv_engineer", *tests);
    }

    RoundOutcome outcome;
    into_report = ParseReport{};
    try {
        WorkProduct extracted = extract_workproduct(sources, state.validation, into_report);
        outcome.parsed = true;
        outcome.violations = validate(extracted, state.validation);
        outcome.violation_count = outcome.violations.size();
        if (product) *product = std::move(extracted);
    } catch (const UnparsedError& e) {
        into_report.diagnostics.push_back({"document", e.what()});
        outcome.parsed = false;
        if (product) *product = WorkProduct{};
    }
    return outcome;
}

}  // namespace

std::string to_string(TopologyId id) {
    switch (id) {
        case TopologyId::lite: return "lite";
        case TopologyId::pro: return "pro";
        case TopologyId::max: return "max";
    }
    return "lite";
}

std::optional<TopologyId> topology_from_string(const std::string& text) {
    const std::string t = util::trim(util::to_lower(text));
    if (t == "lite") return TopologyId::lite;
    if (t == "pro") return TopologyId::pro;
    if (t == "max") return TopologyId::max;
    return std::nullopt;
}

Topology Topology::lite() { return {TopologyId::lite, {"fusa_manager", "vv_engineer"}}; }

Topology Topology::pro() {
    return {TopologyId::pro, {"fusa_manager", "fusa_expert", "vv_engineer"}};
}

Topology Topology::max() {
    return {TopologyId::max, {"fusa_manager", "fusa_expert", "vv_engineer"}};
}

Topology Topology::make(TopologyId id) {
    switch (id) {
        case TopologyId::lite: return lite();
        case TopologyId::pro: return pro();
        case TopologyId::max: return max();
    }
    return lite();
}

const std::string* PipelineState::find_output(const std::string& role_id) const {
    for (const auto& [role, text] : stage_outputs) {
        if (role == role_id) return &text;
    }
    return nullptr;
}

void PipelineState::set_output(const std::string& role_id, std::string text) {
    for (auto& [role, existing] : stage_outputs) {
        if (role == role_id) {
            existing = std::move(text);
            return;
        }
    }
    stage_outputs.emplace_back(role_id, std::move(text));
}

std::string PipelineState::safety_source_role() const {
    for (const auto& stage : topology.stages) {
        if (stage == "fusa_expert") return "fusa_expert";
    }
    return "fusa_manager";
}

const std::string& PipelineState::safety_source() const {
    const std::string* text = find_output(safety_source_role());
    if (!text) throw DomainError("no safety planning output present");
    return *text;
}

void expert_critique_step(PipelineState& state) {
    if (state.topology.id == TopologyId::lite) {
        throw ConfigError("expert stage is not part of the lite topology");
    }
    run_stage(state, "fusa_expert");
}

RoundOutcome self_rag_round(PipelineState& state) {
    if (state.kb == nullptr) {
        throw ConfigError("reflection requires a knowledge base");
    }
    state.round += 1;
    const std::string round_suffix = ".r" + std::to_string(state.round);

    for (const auto& role_id : kSafetyRoles) {
        const std::string* current = state.find_output(role_id);
        if (!current) continue;  // role not staged in this topology

        // Researcher: ground the role's output in retrieved knowledge.
        const auto hits =
            state.kb->retrieve(build_researcher_query(*current, state.requirement),
                               state.reflection.researcher_top_k);
        PromptContext research_ctx;
        research_ctx.requirement = state.requirement;
        research_ctx.upstream.emplace_back(role_id, *current);
        research_ctx.required_upstream = {role_id};
        research_ctx.retrieval = hits;
        research_ctx.task_directive =
            "Update the output from " + role_id +
            " above using the knowledge base excerpts, maintaining its format exactly.";
        research_ctx.tag = "researcher." + role_id + round_suffix;

        const RoleSpec& researcher = state.registry->role(state.version, "researcher");
        RenderedPrompt prompt = render_role_prompt(researcher, state.version, research_ctx);
        CompletionRequest request{prompt.messages, state.temperature, state.max_tokens,
                                  prompt.tag};
        state.set_output(role_id, run_completion(state, request, "researcher for " + role_id));

        // Revisor: apply the role's own revision checklist.
        PromptContext revise_ctx;
        revise_ctx.requirement = state.requirement;
        revise_ctx.upstream.emplace_back(role_id, *state.find_output(role_id));
        revise_ctx.required_upstream = {role_id};
        revise_ctx.task_directive =
            state.registry->revise_instructions_for(role_id, state.version);
        revise_ctx.tag = "revisor." + role_id + round_suffix;

        const RoleSpec& revisor = state.registry->role(state.version, "revisor");
        prompt = render_role_prompt(revisor, state.version, revise_ctx);
        request = {prompt.messages, state.temperature, state.max_tokens, prompt.tag};
        state.set_output(role_id, run_completion(state, request, "revisor for " + role_id));
    }

    ParseReport scratch;
    return evaluate_current(state, scratch, nullptr);
}

RunRecord run_pipeline(const std::string& requirement_text, const Topology& topology,
                       PromptVersion version, const PromptRegistry& registry,
                       ChatBackend& backend, const RunOptions& options) {
    if (util::trim(requirement_text).empty()) {
        throw ConfigError("run requires a non-empty requirement");
    }
    if (version == PromptVersion::v3 && topology.id != TopologyId::max) {
        throw ConfigError("prompt version v3 is only defined for the max topology");
    }
    if (options.reflection.max_rounds < 0 || options.reflection.max_rounds > kMaxRoundsCap) {
        throw ConfigError("reflection max_rounds must be between 0 and " +
                          std::to_string(kMaxRoundsCap));
    }
    const bool needs_kb = topology.id == TopologyId::max || version >= PromptVersion::v2;
    if (needs_kb && options.kb == nullptr) {
        throw ConfigError("topology " + to_string(topology.id) + " at " + to_string(version) +
                          " requires a knowledge base");
    }
    if (!registry.has_version(version)) {
        throw ConfigError("prompt registry does not provide " + to_string(version));
    }

    const auto started = std::chrono::steady_clock::now();

    PipelineState state;
    state.requirement = requirement_text;
    state.requirement_chunks = chunk_document("requirement", requirement_text, ChunkingParams{});
    state.topology = topology;
    state.version = version;
    state.registry = &registry;
    state.backend = &backend;
    state.kb = options.kb;
    state.reflection = options.reflection;
    state.validation = options.validation;
    state.stage_top_k = options.stage_top_k;
    state.temperature = options.temperature;
    state.max_tokens = options.max_tokens;

    for (const auto& role_id : topology.stages) {
        run_stage(state, role_id);
    }

    RunRecord record;
    record.run_id = options.run_id.empty() ? generate_run_id() : options.run_id;
    record.topology_id = to_string(topology.id);
    record.prompt_version = to_string(version);
    record.backend_id = backend.id();

    RoundOutcome outcome = evaluate_current(state, record.parse_report, &record.product);
    record.rounds.push_back(outcome);

    if (topology.reflective()) {
        for (int round = 1; round <= options.reflection.max_rounds; ++round) {
            const RoundOutcome& last = record.rounds.back();
            if (options.reflection.stop_on_clean && last.parsed && last.violations.empty()) {
                break;
            }
            record.rounds.push_back(self_rag_round(state));
        }
        if (record.rounds.size() > 1) {
            // Re-extract so product and parse_report describe the final outputs.
            evaluate_current(state, record.parse_report, &record.product);
        }
    }

    const RoundOutcome& final_round = record.rounds.back();
    record.unparsed = !final_round.parsed;
    record.final_violations = final_round.violations;
    record.transcript = state.transcript;

    record.product.requirement_text = requirement_text;
    record.product.provenance.topology = record.topology_id;
    record.product.provenance.prompt_version = record.prompt_version;
    record.product.provenance.backend_id = record.backend_id;
    record.product.provenance.timestamp = util::iso8601_now();

    record.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();

    if (!options.runs_dir.empty()) {
        persist_run_record(record, options.runs_dir);
    }
    return record;
}

std::string meta_to_json(const RunRecord& record) {
    json meta;
    meta["run_id"] = record.run_id;
    meta["topology"] = record.topology_id;
    meta["prompt_version"] = record.prompt_version;
    meta["backend_id"] = record.backend_id;
    meta["duration_ms"] = record.duration_ms;
    meta["unparsed"] = record.unparsed;
    meta["rounds_executed"] = record.rounds_executed();
    json rounds = json::array();
    for (const auto& outcome : record.rounds) {
        if (outcome.parsed) {
            rounds.push_back(outcome.violation_count);
        } else {
            rounds.push_back(nullptr);
        }
    }
    meta["violations_per_round"] = std::move(rounds);
    meta["tables_found"] = record.parse_report.tables_found;
    meta["rows_parsed"] = record.parse_report.rows_parsed;
    meta["rows_rejected"] = record.parse_report.rows_rejected;
    json diags = json::array();
    for (const auto& diag : record.parse_report.diagnostics) {
        diags.push_back({{"location", diag.location}, {"message", diag.message}});
    }
    meta["diagnostics"] = std::move(diags);
    return meta.dump(2) + "\n";
}

void persist_run_record(const RunRecord& record, const std::string& runs_dir) {
    const fs::path dir = fs::path(runs_dir) / record.run_id;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create run directory " + dir.string() + ": " + ec.message());
    }
    util::write_file_atomic((dir / "workproduct.json").string(),
                            to_canonical_json(record.product));
    util::write_file_atomic((dir / "transcript.jsonl").string(), record.transcript.to_jsonl());
    util::write_file_atomic((dir / "violations.json").string(),
                            violations_to_json(record.final_violations));
    util::write_file_atomic((dir / "meta.json").string(), meta_to_json(record));
}

RunRecord load_run_record(const std::string& run_dir) {
    const fs::path dir(run_dir);
    if (!fs::is_directory(dir)) {
        throw IoError("run directory does not exist: " + run_dir);
    }
    RunRecord record;
    record.product = workproduct_from_json(util::read_file((dir / "workproduct.json").string()));
    record.final_violations =
        violations_from_json(util::read_file((dir / "violations.json").string()));
    record.transcript = Transcript::from_jsonl(util::read_file((dir / "transcript.jsonl").string()));

    json meta;
    try {
        meta = json::parse(util::read_file((dir / "meta.json").string()));
    } catch (const json::exception& e) {
        throw IoError("meta.json malformed in " + run_dir + ": " + e.what());
    }
    try {
        record.run_id = meta.at("run_id").get<std::string>();
        record.topology_id = meta.at("topology").get<std::string>();
        record.prompt_version = meta.at("prompt_version").get<std::string>();
        record.backend_id = meta.at("backend_id").get<std::string>();
        record.duration_ms = meta.at("duration_ms").get<std::int64_t>();
        record.unparsed = meta.at("unparsed").get<bool>();
        for (const auto& entry : meta.at("violations_per_round")) {
            RoundOutcome outcome;
            outcome.parsed = !entry.is_null();
            if (outcome.parsed) outcome.violation_count = entry.get<std::size_t>();
            record.rounds.push_back(outcome);
        }
    } catch (const json::exception& e) {
        throw IoError("meta.json missing fields in " + run_dir + ": " + e.what());
    }
    if (!record.rounds.empty()) {
        record.rounds.back().violations = record.final_violations;
    }
    return record;
}

}  // namespace aegis
