#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aegis/domain.hpp"
#include "aegis/extract.hpp"
#include "aegis/gateway.hpp"
#include "aegis/kb.hpp"
#include "aegis/prompts.hpp"
#include "aegis/validation.hpp"

namespace aegis {

enum class TopologyId { lite, pro, max };

std::string to_string(TopologyId id);
std::optional<TopologyId> topology_from_string(const std::string& text);

/// Stage order is fixed per flavor; only max runs the reflection loop.
struct Topology {
    TopologyId id = TopologyId::lite;
    std::vector<std::string> stages;

    static Topology lite();
    static Topology pro();
    static Topology max();
    static Topology make(TopologyId id);

    bool reflective() const { return id == TopologyId::max; }
};

struct ReflectionConfig {
    int max_rounds = 2;  // hard cap 8 keeps every run terminating
    int researcher_top_k = 4;
    bool stop_on_clean = true;
};

/// Everything a run needs besides requirement/topology/version/backend.
struct RunOptions {
    std::string run_id;    // generated when empty
    std::string runs_dir;  // no persistence when empty
    ReflectionConfig reflection;
    ValidationConfig validation = ValidationConfig::defaults();
    const KnowledgeBase* kb = nullptr;
    int stage_top_k = 4;  // retrieval breadth for v2+ stage prompts
    double temperature = 0.0;
    int max_tokens = 4096;
};

/// Mutable state threaded through the stage chain and reflection rounds.
struct PipelineState {
    std::string requirement;
    std::vector<DocumentChunk> requirement_chunks;
    Topology topology;
    PromptVersion version = PromptVersion::v1;
    std::vector<std::pair<std::string, std::string>> stage_outputs;  // (role, current text)
    int round = 0;
    Transcript transcript;

    const PromptRegistry* registry = nullptr;
    ChatBackend* backend = nullptr;
    const KnowledgeBase* kb = nullptr;
    ReflectionConfig reflection;
    ValidationConfig validation;
    int stage_top_k = 4;
    double temperature = 0.0;
    int max_tokens = 4096;

    const std::string* find_output(const std::string& role_id) const;
    void set_output(const std::string& role_id, std::string text);
    /// The text downstream consumers read as "the safety planning":
    /// the expert's output when that stage ran, else the manager's.
    const std::string& safety_source() const;
    std::string safety_source_role() const;
};

struct RoundOutcome {
    bool parsed = false;
    std::vector<Violation> violations;
    // Survives persist/load even though the per-round violation lists do not.
    std::size_t violation_count = 0;
};

struct RunRecord {
    std::string run_id;
    std::string topology_id;
    std::string prompt_version;
    std::string backend_id;
    WorkProduct product;
    bool unparsed = false;
    ParseReport parse_report;
    std::vector<RoundOutcome> rounds;  // index 0 = initial parse, then one per reflection round
    std::vector<Violation> final_violations;
    std::int64_t duration_ms = 0;
    Transcript transcript;

    int rounds_executed() const {
        return rounds.empty() ? 0 : static_cast<int>(rounds.size()) - 1;
    }
};

/// Runs the stage chain (and, for max, the reflection loop), parses the
/// final outputs, validates, and persists the run directory when
/// options.runs_dir is set. Parse failure after the last round flags the
/// record unparsed instead of throwing, so evaluation can score it.
RunRecord run_pipeline(const std::string& requirement_text, const Topology& topology,
                       PromptVersion version, const PromptRegistry& registry,
                       ChatBackend& backend, const RunOptions& options);

/// The expert stage: consumes the manager output, emits the corrected
/// safety planning that replaces it downstream. Pro/max only.
void expert_critique_step(PipelineState& state);

/// One Self-RAG round: per safety role, a Researcher call grounded in kb
/// retrieval over the role's current output, then a Revisor call carrying
/// that role's revise checklist. Returns the re-parse outcome.
RoundOutcome self_rag_round(PipelineState& state);

/// runs/<run_id>/workproduct.json, transcript.jsonl, violations.json,
/// meta.json — each written atomically.
void persist_run_record(const RunRecord& record, const std::string& runs_dir);
RunRecord load_run_record(const std::string& run_dir);

std::string meta_to_json(const RunRecord& record);

}  // namespace aegis
