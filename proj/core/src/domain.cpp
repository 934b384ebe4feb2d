#include "aegis/domain.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "aegis/errors.hpp"
#include "aegis/util.hpp"

namespace aegis {

namespace {

using nlohmann::json;

const char* kAsilNames[] = {"QM", "A", "B", "C", "D"};
const char* kCategoryNames[] = {"self_failure", "link_failure", "power_supply_failure",
                                "other"};

template <typename Enum>
std::optional<Enum> coded_rating_from_string(const std::string& text, char letter, int max) {
    const std::string t = util::trim(util::to_lower(text));
    const char lower_letter = static_cast<char>(std::tolower(letter));
    if (t.size() == 2 && t[0] == lower_letter && t[1] >= '0' && t[1] <= char('0' + max)) {
        return static_cast<Enum>(t[1] - '0');
    }
    // Bare digit, e.g. severity cell "3".
    if (t.size() == 1 && t[0] >= '0' && t[0] <= char('0' + max)) {
        return static_cast<Enum>(t[0] - '0');
    }
    return std::nullopt;
}

}  // namespace

std::string to_string(Severity s) { return "S" + std::to_string(static_cast<int>(s)); }
std::string to_string(Exposure e) { return "E" + std::to_string(static_cast<int>(e)); }
std::string to_string(Controllability c) { return "C" + std::to_string(static_cast<int>(c)); }
std::string to_string(AsilLevel a) { return kAsilNames[static_cast<int>(a)]; }

std::optional<Severity> severity_from_string(const std::string& text) {
    return coded_rating_from_string<Severity>(text, 'S', 3);
}

std::optional<Exposure> exposure_from_string(const std::string& text) {
    return coded_rating_from_string<Exposure>(text, 'E', 4);
}

std::optional<Controllability> controllability_from_string(const std::string& text) {
    return coded_rating_from_string<Controllability>(text, 'C', 3);
}

std::optional<AsilLevel> asil_from_string(const std::string& text) {
    std::string t = util::trim(util::to_lower(text));
    if (util::starts_with(t, "asil")) {
        // Accept "ASIL B", "ASIL-B", "ASIL_B", "ASIL: B"; bare "asil" names no level.
        const auto body = t.find_first_not_of(" -_:", 4);
        t = body == std::string::npos ? "" : t.substr(body);
    }
    if (t == "qm") return AsilLevel::QM;
    if (t == "a") return AsilLevel::A;
    if (t == "b") return AsilLevel::B;
    if (t == "c") return AsilLevel::C;
    if (t == "d") return AsilLevel::D;
    return std::nullopt;
}

AsilLevel determine_asil(Severity s, Exposure e, Controllability c) {
    const int si = static_cast<int>(s);
    const int ei = static_cast<int>(e);
    const int ci = static_cast<int>(c);
    if (si == 0 || ei == 0 || ci == 0) return AsilLevel::QM;
    switch (si + ei + ci) {
        case 10: return AsilLevel::D;
        case 9: return AsilLevel::C;
        case 8: return AsilLevel::B;
        case 7: return AsilLevel::A;
        default: return AsilLevel::QM;
    }
}

AsilLevel asil_max(AsilLevel a, AsilLevel b) {
    return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

std::string to_string(FaultCategory c) { return kCategoryNames[static_cast<int>(c)]; }

std::optional<FaultCategory> fault_category_from_string(const std::string& text) {
    std::string t = util::trim(util::to_lower(text));
    std::replace(t.begin(), t.end(), ' ', '_');
    std::replace(t.begin(), t.end(), '-', '_');
    for (int i = 0; i < 4; ++i) {
        if (t == kCategoryNames[i]) return static_cast<FaultCategory>(i);
    }
    return std::nullopt;
}

const SafetyGoal* WorkProduct::find_safety_goal(const std::string& sg_id) const {
    for (const auto& sg : safety_goals) {
        if (sg.sg_id == sg_id) return &sg;
    }
    return nullptr;
}

const FunctionalSafetyRequirement* WorkProduct::find_fsr(const std::string& fsr_id) const {
    for (const auto& fsr : fsrs) {
        if (fsr.fsr_id == fsr_id) return &fsr;
    }
    return nullptr;
}

SafetyGoal merge_safety_goals(const std::vector<SafetyGoal>& goals) {
    if (goals.empty()) throw DomainError("merge_safety_goals: empty input list");

    SafetyGoal merged = goals.front();
    std::set<std::string> hazards(merged.source_hazard_ids.begin(),
                                  merged.source_hazard_ids.end());
    std::vector<std::string> merged_ids;
    for (std::size_t i = 1; i < goals.size(); ++i) {
        const SafetyGoal& g = goals[i];
        merged.asil = asil_max(merged.asil, g.asil);
        merged.ftti_ms = std::min(merged.ftti_ms, g.ftti_ms);
        hazards.insert(g.source_hazard_ids.begin(), g.source_hazard_ids.end());
        merged_ids.push_back(g.sg_id);
    }
    merged.source_hazard_ids.assign(hazards.begin(), hazards.end());
    if (!merged_ids.empty()) {
        std::sort(merged_ids.begin(), merged_ids.end());
        merged.description += " [merged: " + util::join(merged_ids, ", ") + "]";
    }
    return merged;
}

AsilLevel effective_asil(const FunctionalSafetyRequirement& fsr, const WorkProduct& product) {
    if (fsr.traced_sg_ids.empty()) {
        throw DomainError("effective_asil: FSR " + fsr.fsr_id + " traces no safety goals");
    }
    AsilLevel level = AsilLevel::QM;
    for (const auto& sg_id : fsr.traced_sg_ids) {
        const SafetyGoal* sg = product.find_safety_goal(sg_id);
        if (sg == nullptr) {
            throw DomainError("effective_asil: unresolved SG reference " + sg_id + " in FSR " +
                              fsr.fsr_id);
        }
        level = asil_max(level, sg->asil);
    }
    return level;
}

namespace {

json hazard_to_json(const HazardEntry& h) {
    return json{{"hazard_id", h.hazard_id},
                {"name", h.name},
                {"failure_mode", h.failure_mode},
                {"scenario", h.scenario},
                {"severity", to_string(h.severity)},
                {"exposure", to_string(h.exposure)},
                {"controllability", to_string(h.controllability)},
                {"asil", to_string(h.asil)},
                {"ftti_ms", h.ftti_ms},
                {"safety_goal_id", h.safety_goal_id}};
}

json sg_to_json(const SafetyGoal& sg) {
    return json{{"sg_id", sg.sg_id},
                {"description", sg.description},
                {"asil", to_string(sg.asil)},
                {"ftti_ms", sg.ftti_ms},
                {"source_hazard_ids", sg.source_hazard_ids}};
}

json fsr_to_json(const FunctionalSafetyRequirement& f) {
    return json{{"fsr_id", f.fsr_id},
                {"description", f.description},
                {"safe_state", f.safe_state},
                {"asil", to_string(f.asil)},
                {"ftti_ms", f.ftti_ms},
                {"traced_sg_ids", f.traced_sg_ids},
                {"subsystem", f.subsystem},
                {"safety_mechanism", f.safety_mechanism}};
}

json tc_to_json(const TestCase& tc) {
    json j{{"tc_id", tc.tc_id},
           {"traced_fsr_id", tc.traced_fsr_id},
           {"asil", to_string(tc.asil)},
           {"test_method", tc.test_method},
           {"derivation_method", tc.derivation_method},
           {"steps", tc.steps},
           {"expected_result", tc.expected_result}};
    j["injected_fault"] = tc.injected_fault.has_value() ? json(*tc.injected_fault) : json();
    return j;
}

json fta_to_json(const FaultTreeEvent& ev) {
    return json{{"event_id", ev.event_id},
                {"description", ev.description},
                {"category", to_string(ev.category)},
                {"covering_fsr_ids", ev.covering_fsr_ids}};
}

template <typename Parser>
auto parse_enum(const json& j, const char* field, Parser parser) {
    const std::string text = j.at(field).get<std::string>();
    auto value = parser(text);
    if (!value) {
        throw DomainError(std::string("invalid ") + field + " value: " + text);
    }
    return *value;
}

HazardEntry hazard_from_json(const json& j) {
    HazardEntry h;
    h.hazard_id = j.at("hazard_id").get<std::string>();
    h.name = j.at("name").get<std::string>();
    h.failure_mode = j.at("failure_mode").get<std::string>();
    h.scenario = j.at("scenario").get<std::string>();
    h.severity = parse_enum(j, "severity", severity_from_string);
    h.exposure = parse_enum(j, "exposure", exposure_from_string);
    h.controllability = parse_enum(j, "controllability", controllability_from_string);
    h.asil = parse_enum(j, "asil", asil_from_string);
    h.ftti_ms = j.at("ftti_ms").get<std::int64_t>();
    h.safety_goal_id = j.at("safety_goal_id").get<std::string>();
    return h;
}

SafetyGoal sg_from_json(const json& j) {
    SafetyGoal sg;
    sg.sg_id = j.at("sg_id").get<std::string>();
    sg.description = j.at("description").get<std::string>();
    sg.asil = parse_enum(j, "asil", asil_from_string);
    sg.ftti_ms = j.at("ftti_ms").get<std::int64_t>();
    sg.source_hazard_ids = j.at("source_hazard_ids").get<std::vector<std::string>>();
    return sg;
}

FunctionalSafetyRequirement fsr_from_json(const json& j) {
    FunctionalSafetyRequirement f;
    f.fsr_id = j.at("fsr_id").get<std::string>();
    f.description = j.at("description").get<std::string>();
    f.safe_state = j.at("safe_state").get<std::string>();
    f.asil = parse_enum(j, "asil", asil_from_string);
    f.ftti_ms = j.at("ftti_ms").get<std::int64_t>();
    f.traced_sg_ids = j.at("traced_sg_ids").get<std::vector<std::string>>();
    f.subsystem = j.at("subsystem").get<std::string>();
    f.safety_mechanism = j.at("safety_mechanism").get<std::string>();
    return f;
}

TestCase tc_from_json(const json& j) {
    TestCase tc;
    tc.tc_id = j.at("tc_id").get<std::string>();
    tc.traced_fsr_id = j.at("traced_fsr_id").get<std::string>();
    tc.asil = parse_enum(j, "asil", asil_from_string);
    tc.test_method = j.at("test_method").get<std::string>();
    tc.derivation_method = j.at("derivation_method").get<std::string>();
    tc.steps = j.at("steps").get<std::vector<std::string>>();
    tc.expected_result = j.at("expected_result").get<std::string>();
    if (j.contains("injected_fault") && !j.at("injected_fault").is_null()) {
        tc.injected_fault = j.at("injected_fault").get<std::string>();
    }
    return tc;
}

FaultTreeEvent fta_from_json(const json& j) {
    FaultTreeEvent ev;
    ev.event_id = j.at("event_id").get<std::string>();
    ev.description = j.at("description").get<std::string>();
    ev.category = parse_enum(j, "category", fault_category_from_string);
    ev.covering_fsr_ids = j.at("covering_fsr_ids").get<std::vector<std::string>>();
    return ev;
}

}  // namespace

std::string to_canonical_json(const WorkProduct& product) {
    json j;
    j["requirement_text"] = product.requirement_text;
    j["hazards"] = json::array();
    for (const auto& h : product.hazards) j["hazards"].push_back(hazard_to_json(h));
    j["safety_goals"] = json::array();
    for (const auto& sg : product.safety_goals) j["safety_goals"].push_back(sg_to_json(sg));
    j["fsrs"] = json::array();
    for (const auto& f : product.fsrs) j["fsrs"].push_back(fsr_to_json(f));
    j["test_cases"] = json::array();
    for (const auto& tc : product.test_cases) j["test_cases"].push_back(tc_to_json(tc));
    j["fta_events"] = json::array();
    for (const auto& ev : product.fta_events) j["fta_events"].push_back(fta_to_json(ev));
    j["provenance"] = json{{"topology", product.provenance.topology},
                           {"prompt_version", product.provenance.prompt_version},
                           {"backend_id", product.provenance.backend_id},
                           {"timestamp", product.provenance.timestamp}};
    return j.dump(2) + "\n";
}

WorkProduct workproduct_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw DomainError(std::string("work product JSON parse error: ") + e.what());
    }
    try {
        WorkProduct p;
        p.requirement_text = j.at("requirement_text").get<std::string>();
        for (const auto& item : j.at("hazards")) p.hazards.push_back(hazard_from_json(item));
        for (const auto& item : j.at("safety_goals")) p.safety_goals.push_back(sg_from_json(item));
        for (const auto& item : j.at("fsrs")) p.fsrs.push_back(fsr_from_json(item));
        for (const auto& item : j.at("test_cases")) p.test_cases.push_back(tc_from_json(item));
        for (const auto& item : j.at("fta_events")) p.fta_events.push_back(fta_from_json(item));
        const auto& prov = j.at("provenance");
        p.provenance.topology = prov.at("topology").get<std::string>();
        p.provenance.prompt_version = prov.at("prompt_version").get<std::string>();
        p.provenance.backend_id = prov.at("backend_id").get<std::string>();
        p.provenance.timestamp = prov.at("timestamp").get<std::string>();
        return p;
    } catch (const json::exception& e) {
        throw DomainError(std::string("work product JSON shape error: ") + e.what());
    }
}

}  // namespace aegis
