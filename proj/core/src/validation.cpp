#include "aegis/validation.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "aegis/errors.hpp"
#include "aegis/util.hpp"

namespace aegis {

namespace {

const char* kRuleNames[] = {"R1", "R2", "R3", "R4",  "R5",  "R6", "R7",
                            "R8", "R9", "R10", "R11", "R12", "R13"};

constexpr RuleSeverity kRuleSeverities[] = {
    RuleSeverity::major,     // R1
    RuleSeverity::blocking,  // R2
    RuleSeverity::blocking,  // R3
    RuleSeverity::blocking,  // R4
    RuleSeverity::blocking,  // R5
    RuleSeverity::major,     // R6
    RuleSeverity::major,     // R7
    RuleSeverity::blocking,  // R8
    RuleSeverity::major,     // R9
    RuleSeverity::major,     // R10
    RuleSeverity::minor,     // R11
    RuleSeverity::major,     // R12
    RuleSeverity::major,     // R13
};

RuleId rule_from_string(const std::string& name) {
    for (std::size_t i = 0; i < std::size(kRuleNames); ++i) {
        if (name == kRuleNames[i]) return static_cast<RuleId>(i);
    }
    throw IoError("unknown rule id: " + name);
}

RuleSeverity severity_from_name(const std::string& name) {
    if (name == "blocking") return RuleSeverity::blocking;
    if (name == "major") return RuleSeverity::major;
    if (name == "minor") return RuleSeverity::minor;
    throw IoError("unknown violation severity: " + name);
}

TableKind table_kind_from_string(const std::string& name) {
    if (name == "hara") return TableKind::hara;
    if (name == "safety_goals") return TableKind::safety_goals;
    if (name == "fsr") return TableKind::fsr;
    if (name == "test_cases") return TableKind::test_cases;
    if (name == "fta_events") return TableKind::fta_events;
    throw ConfigError("unknown table kind: " + name);
}

MethodPermission permission_from_string(const std::string& name) {
    if (name == "required") return MethodPermission::required;
    if (name == "permitted") return MethodPermission::permitted;
    if (name == "forbidden") return MethodPermission::forbidden;
    throw ConfigError("unknown method permission: " + name);
}

std::string to_string(MethodPermission p) {
    switch (p) {
        case MethodPermission::required: return "required";
        case MethodPermission::permitted: return "permitted";
        case MethodPermission::forbidden: return "forbidden";
    }
    return "permitted";
}

TableSchema make_schema(TableKind kind,
                        std::vector<ColumnSpec> columns) {
    TableSchema schema;
    schema.kind = kind;
    schema.columns = std::move(columns);
    return schema;
}

std::map<std::string, MethodPermission> permissions(MethodPermission qm, MethodPermission a,
                                                    MethodPermission b, MethodPermission c,
                                                    MethodPermission d) {
    return {{"QM", qm}, {"A", a}, {"B", b}, {"C", c}, {"D", d}};
}

}  // namespace

std::string to_string(RuleId rule) { return kRuleNames[static_cast<int>(rule)]; }

std::string to_string(RuleSeverity severity) {
    switch (severity) {
        case RuleSeverity::blocking: return "blocking";
        case RuleSeverity::major: return "major";
        case RuleSeverity::minor: return "minor";
    }
    return "major";
}

RuleSeverity rule_severity(RuleId rule) { return kRuleSeverities[static_cast<int>(rule)]; }

std::string to_string(TableKind kind) {
    switch (kind) {
        case TableKind::hara: return "hara";
        case TableKind::safety_goals: return "safety_goals";
        case TableKind::fsr: return "fsr";
        case TableKind::test_cases: return "test_cases";
        case TableKind::fta_events: return "fta_events";
    }
    return "hara";
}

ValidationConfig ValidationConfig::defaults() {
    ValidationConfig cfg;

    cfg.table_schemas.push_back(make_schema(
        TableKind::hara,
        {
            {"hazard_id", {"hazard id", "hazard"}, true},
            {"name", {"name", "hazard name", "function"}, false},
            {"failure_mode", {"failure mode", "malfunction", "malfunctioning behavior"}, false},
            {"scenario", {"driving scenario", "scenario", "situation", "operational situation"}, false},
            {"severity", {"s", "severity"}, true},
            {"exposure", {"e", "exposure"}, true},
            {"controllability", {"c", "controllability"}, true},
            {"asil", {"asil", "asil rating"}, false},
            {"ftti_ms", {"ftti", "ftti ms"}, false},
            {"safety_goal_id", {"safety goal id", "sg id"}, false},
        }));
    cfg.table_schemas.push_back(make_schema(
        TableKind::safety_goals,
        {
            {"sg_id", {"safety goal id", "sg id"}, true},
            {"description", {"description", "safety goal", "safety goal description", "goal"}, false},
            {"asil", {"asil", "asil rating"}, false},
            {"ftti_ms", {"ftti", "ftti ms"}, false},
            {"source_hazard_ids", {"source hazard ids", "hazard ids", "source hazards"}, true},
        }));
    cfg.table_schemas.push_back(make_schema(
        TableKind::fsr,
        {
            {"fsr_id", {"fsr id", "requirement id"}, true},
            {"description", {"description", "fsr description", "requirement", "requirement text"}, false},
            {"traced_sg_ids", {"traced sg ids", "safety goal ids", "traced safety goals", "sg id"}, false},
            {"asil", {"asil", "asil rating"}, false},
            {"safe_state", {"safe state"}, true},
            {"ftti_ms", {"ftti", "ftti ms"}, false},
            {"subsystem", {"subsystem", "allocated to", "allocation", "element"}, false},
            {"safety_mechanism", {"safety mechanism", "mechanism", "diagnostic measure"}, false},
        }));
    cfg.table_schemas.push_back(make_schema(
        TableKind::test_cases,
        {
            {"tc_id", {"test case id", "tc id", "test id"}, true},
            {"traced_fsr_id", {"traced fsr id", "fsr id", "requirement id", "traces to"}, false},
            {"asil", {"asil", "asil rating"}, false},
            {"test_method", {"test method", "method"}, false},
            {"derivation_method", {"derivation method", "derivation", "derived by"}, false},
            {"steps", {"steps", "test steps", "procedure"}, false},
            {"expected_result", {"expected result", "expected results", "expected outcome"}, true},
            {"injected_fault", {"injected fault", "fault injection", "fault"}, false},
        }));
    cfg.table_schemas.push_back(make_schema(
        TableKind::fta_events,
        {
            {"event_id", {"event id", "fault id", "node id"}, true},
            {"description", {"description", "event", "fault description", "basic event"}, false},
            {"category", {"category", "failure mode category", "failure category", "fault category", "failure type"}, true},
            {"covering_fsr_ids", {"covering fsr ids", "covered by", "fsr ids", "mitigating fsrs"}, false},
        }));

    using P = MethodPermission;
    cfg.method_matrix = {
        {"requirements_based_test", permissions(P::permitted, P::required, P::required, P::required, P::required)},
        {"fault_injection_test", permissions(P::permitted, P::permitted, P::permitted, P::required, P::required)},
        {"back_to_back_simulation_test", permissions(P::permitted, P::permitted, P::permitted, P::permitted, P::permitted)},
        {"performance_test", permissions(P::permitted, P::permitted, P::permitted, P::permitted, P::permitted)},
        {"long_term_test", permissions(P::permitted, P::permitted, P::permitted, P::permitted, P::permitted)},
        {"stress_test", permissions(P::permitted, P::permitted, P::permitted, P::permitted, P::permitted)},
        {"exploratory_test", permissions(P::permitted, P::permitted, P::forbidden, P::forbidden, P::forbidden)},
    };

    // snake_case multiword tokens ("brake_torque_req") or camelCase tokens.
    cfg.signal_pattern =
        "[A-Za-z][A-Za-z0-9]*(?:_[A-Za-z0-9]+)+|\\b[a-z]+(?:[A-Z][a-z0-9]*)+\\b";

    cfg.fault_keywords = {
        {"self_failure", {"self", "internal", "ecu", "sensor", "actuator", "stuck", "drift"}},
        {"link_failure", {"link", "can bus", "canbus", "communication", "message loss", "signal loss", "timeout"}},
        {"power_supply_failure", {"power", "supply", "voltage", "battery", "undervoltage"}},
    };

    return cfg;
}

ValidationConfig ValidationConfig::from_json(const std::string& json_text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("validation config is not valid JSON: ") + e.what());
    }
    try {
        ValidationConfig cfg;
        for (const auto& schema_json : root.at("table_schemas")) {
            TableSchema schema;
            schema.kind = table_kind_from_string(schema_json.at("kind").get<std::string>());
            for (const auto& col_json : schema_json.at("columns")) {
                ColumnSpec col;
                col.field = col_json.at("field").get<std::string>();
                col.aliases = col_json.at("aliases").get<std::vector<std::string>>();
                col.fingerprint = col_json.value("fingerprint", false);
                schema.columns.push_back(std::move(col));
            }
            cfg.table_schemas.push_back(std::move(schema));
        }
        for (const auto& [method, by_asil] : root.at("method_matrix").items()) {
            for (const auto& [asil, perm] : by_asil.items()) {
                cfg.method_matrix[method][asil] = permission_from_string(perm.get<std::string>());
            }
        }
        cfg.signal_pattern = root.at("signal_pattern").get<std::string>();
        try {
            std::regex probe(cfg.signal_pattern);
        } catch (const std::regex_error& e) {
            throw ConfigError(std::string("signal_pattern is not a valid regex: ") + e.what());
        }
        for (const auto& [category, words] : root.at("fault_keywords").items()) {
            cfg.fault_keywords[category] = words.get<std::vector<std::string>>();
        }
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("validation config malformed: ") + e.what());
    }
}

ValidationConfig ValidationConfig::load(const std::string& path) {
    return from_json(util::read_file(path));
}

std::string ValidationConfig::to_json() const {
    nlohmann::json root;
    root["table_schemas"] = nlohmann::json::array();
    for (const auto& schema : table_schemas) {
        nlohmann::json schema_json;
        schema_json["kind"] = to_string(schema.kind);
        schema_json["columns"] = nlohmann::json::array();
        for (const auto& col : schema.columns) {
            schema_json["columns"].push_back(
                {{"field", col.field}, {"aliases", col.aliases}, {"fingerprint", col.fingerprint}});
        }
        root["table_schemas"].push_back(std::move(schema_json));
    }
    for (const auto& [method, by_asil] : method_matrix) {
        for (const auto& [asil, perm] : by_asil) {
            root["method_matrix"][method][asil] = to_string(perm);
        }
    }
    root["signal_pattern"] = signal_pattern;
    root["fault_keywords"] = fault_keywords;
    return root.dump(2) + "\n";
}

namespace {

/// Lowercase, punctuation folded to underscores: "Fault Injection Test"
/// and "fault-injection test" both normalize to fault_injection_test.
std::string normalize_method(const std::string& raw) {
    std::string out;
    bool pending_sep = false;
    for (char ch : util::trim(raw)) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            if (pending_sep && !out.empty()) out.push_back('_');
            pending_sep = false;
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        } else {
            pending_sep = true;
        }
    }
    return out;
}

class RuleContext {
  public:
    RuleContext(const WorkProduct& product, const ValidationConfig& config)
        : product_(product), config_(config) {}

    std::vector<Violation> run() {
        check_hazards();
        check_safety_goals();
        check_fsrs();
        check_test_cases();
        check_fta_events();
        check_fault_coverage();

        std::sort(violations_.begin(), violations_.end(), [](const Violation& a, const Violation& b) {
            return std::tie(a.rule_id, a.entity_id, a.message) <
                   std::tie(b.rule_id, b.entity_id, b.message);
        });
        return std::move(violations_);
    }

  private:
    void add(RuleId rule, std::string entity, std::string message) {
        if (entity.empty()) entity = "document";
        violations_.push_back({rule, rule_severity(rule), std::move(entity), std::move(message)});
    }

    void require_filled(const std::string& entity, const std::string& column,
                        const std::string& value) {
        if (util::trim(value).empty()) {
            add(RuleId::R1, entity, column + " column empty");
        }
    }

    // Duplicate-id reports for every list except FSRs, which R2 owns.
    template <typename T, typename IdOf>
    void check_duplicate_ids(const std::vector<T>& items, IdOf id_of, const std::string& kind,
                             RuleId rule) {
        std::map<std::string, int> seen;
        for (const auto& item : items) {
            const std::string id = id_of(item);
            if (util::trim(id).empty()) continue;  // emptiness reported separately
            if (++seen[id] > 1) {
                add(rule, id, "duplicate " + kind + " id");
            }
        }
    }

    void check_hazards() {
        check_duplicate_ids(
            product_.hazards, [](const HazardEntry& h) { return h.hazard_id; }, "hazard",
            RuleId::R1);
        for (const auto& h : product_.hazards) {
            const std::string& entity = h.hazard_id;
            require_filled(entity, "hazard id", h.hazard_id);
            require_filled(entity, "name", h.name);
            require_filled(entity, "failure mode", h.failure_mode);
            require_filled(entity, "scenario", h.scenario);
            require_filled(entity, "safety goal id", h.safety_goal_id);
            if (h.ftti_ms <= 0) {
                add(RuleId::R1, entity, "ftti column empty or non-positive");
            }
            const AsilLevel expected = determine_asil(h.severity, h.exposure, h.controllability);
            if (h.asil != expected) {
                add(RuleId::R1, entity,
                    "asil " + to_string(h.asil) + " inconsistent with ratings " +
                        to_string(h.severity) + "/" + to_string(h.exposure) + "/" +
                        to_string(h.controllability) + " (expected " + to_string(expected) + ")");
            }
            if (!util::trim(h.safety_goal_id).empty() &&
                product_.find_safety_goal(h.safety_goal_id) == nullptr) {
                add(RuleId::R1, entity, "references missing safety goal " + h.safety_goal_id);
            }
        }
    }

    void check_safety_goals() {
        check_duplicate_ids(
            product_.safety_goals, [](const SafetyGoal& g) { return g.sg_id; }, "safety goal",
            RuleId::R1);
        std::set<std::string> hazard_ids;
        for (const auto& h : product_.hazards) hazard_ids.insert(h.hazard_id);
        for (const auto& g : product_.safety_goals) {
            const std::string& entity = g.sg_id;
            require_filled(entity, "safety goal id", g.sg_id);
            require_filled(entity, "description", g.description);
            if (g.ftti_ms <= 0) {
                add(RuleId::R1, entity, "ftti column empty or non-positive");
            }
            if (g.source_hazard_ids.empty()) {
                add(RuleId::R1, entity, "source hazard ids column empty");
            }
            for (const auto& hid : g.source_hazard_ids) {
                if (!hazard_ids.count(hid)) {
                    add(RuleId::R1, entity, "references missing hazard " + hid);
                }
            }
        }
    }

    void check_fsrs() {
        std::map<std::string, int> fsr_id_counts;
        for (const auto& f : product_.fsrs) {
            if (!util::trim(f.fsr_id).empty()) ++fsr_id_counts[f.fsr_id];
        }
        for (const auto& [id, count] : fsr_id_counts) {
            for (int i = 1; i < count; ++i) add(RuleId::R2, id, "duplicate fsr id");
        }

        std::set<std::string> covered_fsr_ids;
        for (const auto& tc : product_.test_cases) covered_fsr_ids.insert(tc.traced_fsr_id);

        for (const auto& f : product_.fsrs) {
            const std::string& entity = f.fsr_id;
            require_filled(entity, "fsr id", f.fsr_id);
            require_filled(entity, "description", f.description);
            require_filled(entity, "safe state", f.safe_state);
            require_filled(entity, "subsystem", f.subsystem);
            require_filled(entity, "safety mechanism", f.safety_mechanism);

            AsilLevel traced_max = AsilLevel::QM;
            std::size_t resolved = 0;
            for (const auto& sg_id : f.traced_sg_ids) {
                if (const SafetyGoal* sg = product_.find_safety_goal(sg_id)) {
                    traced_max = asil_max(traced_max, sg->asil);
                    ++resolved;
                } else {
                    add(RuleId::R1, entity, "traced safety goal " + sg_id + " does not exist");
                }
            }
            if (resolved == 0) {
                add(RuleId::R3, entity,
                    f.traced_sg_ids.empty() ? "traces to no safety goal"
                                            : "traces to no existing safety goal");
            } else if (f.asil != traced_max) {
                add(RuleId::R4, entity,
                    "asil " + to_string(f.asil) + " differs from traced safety goal maximum " +
                        to_string(traced_max));
            }

            if (!covered_fsr_ids.count(f.fsr_id)) {
                add(RuleId::R5, entity, "no test case traces to this fsr");
            }
            if (f.ftti_ms <= 0) {
                add(RuleId::R12, entity, "missing positive time constraint");
            }
        }
    }

    void check_test_cases() {
        check_duplicate_ids(
            product_.test_cases, [](const TestCase& t) { return t.tc_id; }, "test case",
            RuleId::R1);

        const std::regex signal_regex(config_.signal_pattern);

        // R7 identity is content, not position: report every duplicate row
        // against the lexicographically smallest tc id of its group.
        std::map<std::string, std::vector<std::string>> content_groups;
        for (const auto& tc : product_.test_cases) {
            std::string key = tc.traced_fsr_id;
            key.push_back('\x1f');
            key += util::join(tc.steps, "\x1e");
            key.push_back('\x1f');
            key += tc.expected_result;
            content_groups[key].push_back(tc.tc_id);
        }
        for (auto& [key, ids] : content_groups) {
            if (ids.size() < 2) continue;
            std::sort(ids.begin(), ids.end());
            for (std::size_t i = 1; i < ids.size(); ++i) {
                add(RuleId::R7, ids[i],
                    "duplicate of test case " + ids[0] + " (same fsr, steps, expected result)");
            }
        }

        for (const auto& tc : product_.test_cases) {
            const std::string& entity = tc.tc_id;
            require_filled(entity, "test case id", tc.tc_id);
            if (tc.steps.empty()) {
                add(RuleId::R1, entity, "steps column empty");
            }
            require_filled(entity, "expected result", tc.expected_result);

            const FunctionalSafetyRequirement* fsr = product_.find_fsr(tc.traced_fsr_id);
            if (fsr == nullptr) {
                add(RuleId::R6, entity,
                    util::trim(tc.traced_fsr_id).empty()
                        ? "traces to no fsr"
                        : "traces to missing fsr " + tc.traced_fsr_id);
            } else if (tc.asil != fsr->asil) {
                add(RuleId::R6, entity,
                    "asil " + to_string(tc.asil) + " differs from fsr " + fsr->fsr_id + " asil " +
                        to_string(fsr->asil));
            }

            const bool method_present = !util::trim(tc.test_method).empty();
            if (!method_present) {
                add(RuleId::R9, entity, "test method column empty");
            }
            if (util::trim(tc.derivation_method).empty()) {
                add(RuleId::R9, entity, "derivation method column empty");
            }

            // R10 reads the fsr's stored ASIL; trace and ASIL defects are
            // R6's findings and must not echo here.
            if (method_present && fsr != nullptr) {
                const std::string method = normalize_method(tc.test_method);
                auto row = config_.method_matrix.find(method);
                if (row == config_.method_matrix.end()) {
                    add(RuleId::R10, entity, "unknown test method " + tc.test_method);
                } else {
                    auto cell = row->second.find(to_string(fsr->asil));
                    if (cell != row->second.end() && cell->second == MethodPermission::forbidden) {
                        add(RuleId::R10, entity,
                            "test method " + method + " forbidden at asil " + to_string(fsr->asil));
                    }
                }
            }

            if (!util::trim(tc.expected_result).empty() &&
                !std::regex_search(tc.expected_result, signal_regex)) {
                add(RuleId::R11, entity, "expected result names no signal");
            }
        }
    }

    void check_fta_events() {
        check_duplicate_ids(
            product_.fta_events, [](const FaultTreeEvent& e) { return e.event_id; }, "fta event",
            RuleId::R1);
        for (const auto& e : product_.fta_events) {
            const std::string& entity = e.event_id;
            require_filled(entity, "event id", e.event_id);
            require_filled(entity, "description", e.description);

            std::size_t resolved = 0;
            for (const auto& fsr_id : e.covering_fsr_ids) {
                if (product_.find_fsr(fsr_id) != nullptr) {
                    ++resolved;
                } else {
                    add(RuleId::R1, entity, "covering fsr " + fsr_id + " does not exist");
                }
            }
            if (resolved == 0) {
                add(RuleId::R8, entity,
                    e.covering_fsr_ids.empty() ? "covered by no fsr" : "covered by no existing fsr");
            }
        }
    }

    void check_fault_coverage() {
        std::set<FaultCategory> present;
        for (const auto& e : product_.fta_events) present.insert(e.category);
        if (present.empty()) return;

        std::set<FaultCategory> covered;
        for (const auto& tc : product_.test_cases) {
            if (tc.injected_fault && !util::trim(*tc.injected_fault).empty()) {
                covered.insert(classify_fault_text(*tc.injected_fault, config_));
            }
        }
        for (const FaultCategory category : present) {
            if (!covered.count(category)) {
                add(RuleId::R13, "document",
                    "no injected fault covers category " + to_string(category));
            }
        }
    }

    const WorkProduct& product_;
    const ValidationConfig& config_;
    std::vector<Violation> violations_;
};

}  // namespace

FaultCategory classify_fault_text(const std::string& text, const ValidationConfig& config) {
    const std::string lower = util::to_lower(text);
    static const std::pair<const char*, FaultCategory> kOrder[] = {
        {"self_failure", FaultCategory::self_failure},
        {"link_failure", FaultCategory::link_failure},
        {"power_supply_failure", FaultCategory::power_supply_failure},
    };
    for (const auto& [name, category] : kOrder) {
        auto it = config.fault_keywords.find(name);
        if (it == config.fault_keywords.end()) continue;
        for (const auto& word : it->second) {
            if (util::contains(lower, word)) return category;
        }
    }
    return FaultCategory::other;
}

std::vector<Violation> validate(const WorkProduct& product, const ValidationConfig& config) {
    return RuleContext(product, config).run();
}

bool has_blocking(const std::vector<Violation>& violations) {
    return std::any_of(violations.begin(), violations.end(), [](const Violation& v) {
        return v.severity == RuleSeverity::blocking;
    });
}

std::string violations_to_json(const std::vector<Violation>& violations) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : violations) {
        arr.push_back({{"rule_id", to_string(v.rule_id)},
                       {"severity", to_string(v.severity)},
                       {"entity_id", v.entity_id},
                       {"message", v.message}});
    }
    return arr.dump(2) + "\n";
}

std::vector<Violation> violations_from_json(const std::string& json_text) {
    nlohmann::json arr;
    try {
        arr = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("violations file is not valid JSON: ") + e.what());
    }
    if (!arr.is_array()) throw IoError("violations file must hold a JSON array");
    std::vector<Violation> out;
    try {
        for (const auto& item : arr) {
            Violation v;
            v.rule_id = rule_from_string(item.at("rule_id").get<std::string>());
            v.severity = severity_from_name(item.at("severity").get<std::string>());
            v.entity_id = item.at("entity_id").get<std::string>();
            v.message = item.at("message").get<std::string>();
            out.push_back(std::move(v));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("violations file malformed: ") + e.what());
    }
    return out;
}

TraceMatrix build_traceability(const WorkProduct& product) {
    TraceMatrix matrix;

    for (const auto& sg : product.safety_goals) {
        TraceMatrix::SgEntry entry;
        entry.sg_id = sg.sg_id;
        for (const auto& fsr : product.fsrs) {
            if (std::find(fsr.traced_sg_ids.begin(), fsr.traced_sg_ids.end(), sg.sg_id) !=
                fsr.traced_sg_ids.end()) {
                entry.fsr_ids.push_back(fsr.fsr_id);
            }
        }
        if (!entry.fsr_ids.empty()) ++matrix.sgs_with_fsr;
        matrix.sgs.push_back(std::move(entry));
    }

    for (const auto& fsr : product.fsrs) {
        TraceMatrix::FsrEntry entry;
        entry.fsr_id = fsr.fsr_id;
        for (const auto& sg_id : fsr.traced_sg_ids) {
            if (product.find_safety_goal(sg_id) != nullptr) {
                entry.sg_ids.push_back(sg_id);
            } else {
                entry.dangling_sg_ids.push_back(sg_id);
                ++matrix.dangling_count;
            }
        }
        for (const auto& tc : product.test_cases) {
            if (tc.traced_fsr_id == fsr.fsr_id) entry.tc_ids.push_back(tc.tc_id);
        }
        if (!entry.tc_ids.empty()) ++matrix.fsrs_with_tc;
        matrix.fsrs.push_back(std::move(entry));
    }

    for (const auto& tc : product.test_cases) {
        TraceMatrix::TcEntry entry;
        entry.tc_id = tc.tc_id;
        entry.fsr_id = tc.traced_fsr_id;
        entry.dangling = product.find_fsr(tc.traced_fsr_id) == nullptr;
        if (entry.dangling) ++matrix.dangling_count;
        matrix.tcs.push_back(std::move(entry));
    }

    return matrix;
}

}  // namespace aegis
