#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "aegis/domain.hpp"

namespace aegis {

enum class RuleId {
    R1,   // required columns filled (and hazard ASIL consistent with S/E/C)
    R2,   // FSR ids unique
    R3,   // every FSR traces to at least one resolved SG
    R4,   // FSR ASIL equals the max over its traced SGs
    R5,   // every FSR has at least one test case
    R6,   // every test case traces to an existing FSR and carries its ASIL
    R7,   // no duplicate test cases by (traced FSR, steps, expected result)
    R8,   // every FTA event covered by at least one resolved FSR
    R9,   // test method and derivation method present
    R10,  // test method permitted for the FSR's ASIL
    R11,  // expected result names at least one signal
    R12,  // FSR carries a positive time constraint
    R13,  // injected faults cover every FTA failure-mode category present
};

enum class RuleSeverity { blocking, major, minor };

std::string to_string(RuleId rule);
std::string to_string(RuleSeverity severity);
RuleSeverity rule_severity(RuleId rule);

struct Violation {
    RuleId rule_id = RuleId::R1;
    RuleSeverity severity = RuleSeverity::major;
    std::string entity_id;  // artifact id, or the literal "document"
    std::string message;

    bool operator==(const Violation&) const = default;
};

/// One artifact column: the canonical field name plus the normalized header
/// spellings that map onto it. fingerprint columns must all be present for
/// a table to classify as this kind.
struct ColumnSpec {
    std::string field;
    std::vector<std::string> aliases;
    bool fingerprint = false;
};

enum class TableKind { hara, safety_goals, fsr, test_cases, fta_events };

std::string to_string(TableKind kind);

struct TableSchema {
    TableKind kind = TableKind::hara;
    std::vector<ColumnSpec> columns;
};

enum class MethodPermission { required, permitted, forbidden };

/// Everything the parser and rule engine read from schema/validation.config:
/// table-kind header fingerprints, the test-method/ASIL matrix, the signal
/// name pattern, and the fault-category keyword sets.
struct ValidationConfig {
    std::vector<TableSchema> table_schemas;
    // normalized method name -> ASIL name ("QM".."D") -> permission
    std::map<std::string, std::map<std::string, MethodPermission>> method_matrix;
    std::string signal_pattern;
    // category name -> lowercase keywords; first matching category wins in
    // declaration order self/link/power, anything else classifies as other
    std::map<std::string, std::vector<std::string>> fault_keywords;

    static ValidationConfig defaults();
    static ValidationConfig from_json(const std::string& json_text);
    static ValidationConfig load(const std::string& path);
    std::string to_json() const;
};

/// Keyword classification of free-text fault descriptions, first match in
/// the order self / link / power, otherwise other. Shared by the injected
/// fault coverage rule and the parser's category-cell fallback.
FaultCategory classify_fault_text(const std::string& text, const ValidationConfig& config);

/// Runs the full rule catalog. Total over any parsed product; each rule is
/// evaluated independently and the result is sorted by
/// (rule_id, entity_id, message) so permuting artifact lists never changes
/// the violation multiset.
std::vector<Violation> validate(const WorkProduct& product, const ValidationConfig& config);

bool has_blocking(const std::vector<Violation>& violations);

std::string violations_to_json(const std::vector<Violation>& violations);
std::vector<Violation> violations_from_json(const std::string& json_text);

/// SG -> FSR -> test case adjacency with dangling references marked.
struct TraceMatrix {
    struct SgEntry {
        std::string sg_id;
        std::vector<std::string> fsr_ids;  // FSRs tracing this SG
    };
    struct FsrEntry {
        std::string fsr_id;
        std::vector<std::string> sg_ids;           // resolved traces
        std::vector<std::string> dangling_sg_ids;  // unresolved traces
        std::vector<std::string> tc_ids;
    };
    struct TcEntry {
        std::string tc_id;
        std::string fsr_id;
        bool dangling = false;
    };

    std::vector<SgEntry> sgs;
    std::vector<FsrEntry> fsrs;
    std::vector<TcEntry> tcs;

    std::size_t sgs_with_fsr = 0;
    std::size_t fsrs_with_tc = 0;
    std::size_t dangling_count = 0;

    bool has_dangling() const { return dangling_count > 0; }
};

TraceMatrix build_traceability(const WorkProduct& product);

}  // namespace aegis
