#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aegis/errors.hpp"
#include "aegis/util.hpp"
#include "aegis/validation.hpp"
#include "helpers.hpp"

using namespace aegis;

namespace {

const ValidationConfig& cfg() {
    static ValidationConfig config = ValidationConfig::defaults();
    return config;
}

std::vector<Violation> run(const WorkProduct& p) { return validate(p, cfg()); }

bool has_rule(const std::vector<Violation>& vs, RuleId rule, const std::string& entity) {
    return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) {
        return v.rule_id == rule && v.entity_id == entity;
    });
}

std::size_t count_rule(const std::vector<Violation>& vs, RuleId rule) {
    return static_cast<std::size_t>(std::count_if(
        vs.begin(), vs.end(), [&](const Violation& v) { return v.rule_id == rule; }));
}

template <typename T>
void seeded_shuffle(std::vector<T>& items, std::uint64_t seed) {
    std::uint64_t state = seed;
    for (std::size_t i = 0; i + 1 < items.size(); ++i) {
        std::size_t j = i + static_cast<std::size_t>(util::next_bounded(state, items.size() - i));
        std::swap(items[i], items[j]);
    }
}

}  // namespace

TEST_CASE("rule severities match the catalog") {
    CHECK(rule_severity(RuleId::R1) == RuleSeverity::major);
    CHECK(rule_severity(RuleId::R2) == RuleSeverity::blocking);
    CHECK(rule_severity(RuleId::R3) == RuleSeverity::blocking);
    CHECK(rule_severity(RuleId::R4) == RuleSeverity::blocking);
    CHECK(rule_severity(RuleId::R5) == RuleSeverity::blocking);
    CHECK(rule_severity(RuleId::R6) == RuleSeverity::major);
    CHECK(rule_severity(RuleId::R7) == RuleSeverity::major);
    CHECK(rule_severity(RuleId::R8) == RuleSeverity::blocking);
    CHECK(rule_severity(RuleId::R9) == RuleSeverity::major);
    CHECK(rule_severity(RuleId::R10) == RuleSeverity::major);
    CHECK(rule_severity(RuleId::R11) == RuleSeverity::minor);
    CHECK(rule_severity(RuleId::R12) == RuleSeverity::major);
    CHECK(rule_severity(RuleId::R13) == RuleSeverity::major);
    CHECK(to_string(RuleId::R10) == "R10");
    CHECK(to_string(RuleSeverity::blocking) == "blocking");
}

TEST_CASE("a complete consistent product yields no violations") {
    auto vs = run(test_helpers::tiny_product());
    CAPTURE(violations_to_json(vs));
    CHECK(vs.empty());
}

TEST_CASE("R1 flags empty required columns") {
    WorkProduct p = test_helpers::tiny_product();
    p.hazards[0].scenario = "";
    auto vs = run(p);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].rule_id == RuleId::R1);
    CHECK(vs[0].severity == RuleSeverity::major);
    CHECK(vs[0].entity_id == "H-001");
    CHECK(vs[0].message == "scenario column empty");
}

TEST_CASE("R1 flags a hazard ASIL inconsistent with its ratings") {
    WorkProduct p = test_helpers::tiny_product();
    p.hazards[0].asil = AsilLevel::B;  // S3/E4/C3 requires D
    auto vs = run(p);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].rule_id == RuleId::R1);
    CHECK(vs[0].message.find("inconsistent") != std::string::npos);
    CHECK(vs[0].message.find("expected D") != std::string::npos);
}

TEST_CASE("R1 flags dangling cross-references") {
    WorkProduct p = test_helpers::tiny_product();
    p.hazards[0].safety_goal_id = "SG-77";
    p.safety_goals[0].source_hazard_ids.push_back("H-404");
    auto vs = run(p);
    CHECK(has_rule(vs, RuleId::R1, "H-001"));
    CHECK(has_rule(vs, RuleId::R1, "SG-01"));
    CHECK(count_rule(vs, RuleId::R1) == 2);
}

TEST_CASE("R1 flags duplicate non-fsr ids once per extra copy") {
    WorkProduct p = test_helpers::tiny_product();
    p.hazards.push_back(p.hazards[0]);
    auto vs = run(p);
    REQUIRE(count_rule(vs, RuleId::R1) == 1);
    CHECK(has_rule(vs, RuleId::R1, "H-001"));
}

TEST_CASE("R2 flags duplicate fsr ids as blocking") {
    WorkProduct p = test_helpers::tiny_product();
    p.fsrs.push_back(p.fsrs[0]);
    auto vs = run(p);
    REQUIRE(count_rule(vs, RuleId::R2) == 1);
    CHECK(has_rule(vs, RuleId::R2, "FSR-001"));
    CHECK(has_blocking(vs));
    // Three copies report two duplicates.
    p.fsrs.push_back(p.fsrs[0]);
    CHECK(count_rule(run(p), RuleId::R2) == 2);
}

TEST_CASE("R3 distinguishes empty traces from dangling-only traces") {
    WorkProduct p = test_helpers::tiny_product();
    p.fsrs[0].traced_sg_ids = {};
    auto vs = run(p);
    REQUIRE(count_rule(vs, RuleId::R3) == 1);
    CHECK(has_rule(vs, RuleId::R3, "FSR-001"));

    p.fsrs[0].traced_sg_ids = {"SG-99"};
    vs = run(p);
    CHECK(has_rule(vs, RuleId::R3, "FSR-001"));
    CHECK(has_rule(vs, RuleId::R1, "FSR-001"));  // the dangling id itself
}

TEST_CASE("R4 flags an FSR ASIL differing from its traced maximum") {
    WorkProduct p = test_helpers::tiny_product();
    p.fsrs[0].asil = AsilLevel::B;
    p.test_cases[0].asil = AsilLevel::B;  // keep R6 quiet
    auto vs = run(p);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].rule_id == RuleId::R4);
    CHECK(vs[0].entity_id == "FSR-001");
    CHECK(vs[0].severity == RuleSeverity::blocking);
}

TEST_CASE("R4 stays quiet when a dangling trace already suppressed resolution") {
    WorkProduct p = test_helpers::tiny_product();
    p.fsrs[0].traced_sg_ids = {"SG-404"};
    auto vs = run(p);
    CHECK(count_rule(vs, RuleId::R4) == 0);
    CHECK(count_rule(vs, RuleId::R3) == 1);
}

TEST_CASE("R5 flags an FSR with no test case") {
    WorkProduct p = test_helpers::tiny_product();
    p.test_cases.pop_back();  // drops TC-002 for FSR-002
    auto vs = run(p);
    REQUIRE(count_rule(vs, RuleId::R5) == 1);
    CHECK(has_rule(vs, RuleId::R5, "FSR-002"));
}

TEST_CASE("R6 flags dangling test case traces and ASIL mismatches") {
    WorkProduct p = test_helpers::tiny_product();
    p.test_cases[0].traced_fsr_id = "FSR-999";
    auto vs = run(p);
    CHECK(has_rule(vs, RuleId::R6, "TC-001"));
    CHECK(has_rule(vs, RuleId::R5, "FSR-001"));  // coverage is gone too

    p = test_helpers::tiny_product();
    p.test_cases[0].asil = AsilLevel::A;
    vs = run(p);
    REQUIRE(count_rule(vs, RuleId::R6) == 1);
    CHECK(has_rule(vs, RuleId::R6, "TC-001"));
}

TEST_CASE("R7 reports duplicates against the smallest tc id of the group") {
    WorkProduct p = test_helpers::tiny_product();
    TestCase dup = p.test_cases[1];
    dup.tc_id = "TC-009";
    p.test_cases.push_back(dup);
    dup.tc_id = "TC-005";
    p.test_cases.push_back(dup);
    auto vs = run(p);
    REQUIRE(count_rule(vs, RuleId::R7) == 2);
    CHECK(has_rule(vs, RuleId::R7, "TC-005"));
    CHECK(has_rule(vs, RuleId::R7, "TC-009"));
    for (const auto& v : vs) {
        if (v.rule_id == RuleId::R7) {
            CHECK(v.message.find("TC-002") != std::string::npos);
        }
    }
}

TEST_CASE("R7 identity requires fsr, steps, and expected result all equal") {
    WorkProduct p = test_helpers::tiny_product();
    TestCase near_dup = p.test_cases[1];
    near_dup.tc_id = "TC-003";
    near_dup.steps = {"Different first step", "Capture the brake request"};
    p.test_cases.push_back(near_dup);
    CHECK(count_rule(run(p), RuleId::R7) == 0);
}

TEST_CASE("R8 flags uncovered fault tree events") {
    WorkProduct p = test_helpers::tiny_product();
    p.fta_events[0].covering_fsr_ids = {};
    auto vs = run(p);
    REQUIRE(count_rule(vs, RuleId::R8) == 1);
    CHECK(has_rule(vs, RuleId::R8, "FTA-01"));
    CHECK(has_blocking(vs));

    p.fta_events[0].covering_fsr_ids = {"FSR-404"};
    vs = run(p);
    CHECK(has_rule(vs, RuleId::R8, "FTA-01"));
    CHECK(has_rule(vs, RuleId::R1, "FTA-01"));
}

TEST_CASE("R9 flags missing methods") {
    WorkProduct p = test_helpers::tiny_product();
    p.test_cases[0].test_method = "  ";
    p.test_cases[1].derivation_method = "";
    auto vs = run(p);
    REQUIRE(count_rule(vs, RuleId::R9) == 2);
    CHECK(has_rule(vs, RuleId::R9, "TC-001"));
    CHECK(has_rule(vs, RuleId::R9, "TC-002"));
}

TEST_CASE("R10 flags a forbidden method and unknown methods") {
    WorkProduct p = test_helpers::tiny_product();
    p.test_cases[0].test_method = "exploratory_test";  // FSR-001 is ASIL D
    auto vs = run(p);
    REQUIRE(count_rule(vs, RuleId::R10) == 1);
    CHECK(has_rule(vs, RuleId::R10, "TC-001"));

    p.test_cases[0].test_method = "vibes_test";
    vs = run(p);
    REQUIRE(count_rule(vs, RuleId::R10) == 1);
    CHECK(vs[0].message.find("unknown test method") != std::string::npos);
}

TEST_CASE("R10 normalizes method spellings before the matrix lookup") {
    WorkProduct p = test_helpers::tiny_product();
    p.test_cases[0].test_method = "Fault-Injection Test";
    CHECK(run(p).empty());
    p.test_cases[0].test_method = "FAULT  INJECTION  TEST";
    CHECK(run(p).empty());
}

TEST_CASE("R10 does not fire for a method that is merely not required") {
    // exploratory_test is permitted at QM and A; only forbidden cells flag.
    WorkProduct p = test_helpers::tiny_product();
    p.safety_goals[0].asil = AsilLevel::A;
    p.hazards[0].severity = Severity::S2;
    p.hazards[0].exposure = Exposure::E3;
    p.hazards[0].controllability = Controllability::C2;
    p.hazards[0].asil = AsilLevel::A;
    for (auto& f : p.fsrs) f.asil = AsilLevel::A;
    for (auto& t : p.test_cases) t.asil = AsilLevel::A;
    p.test_cases[0].test_method = "exploratory_test";
    auto vs = run(p);
    CAPTURE(violations_to_json(vs));
    CHECK(vs.empty());
}

TEST_CASE("R10 stays quiet when the trace is dangling or the method missing") {
    WorkProduct p = test_helpers::tiny_product();
    p.test_cases[0].traced_fsr_id = "FSR-999";
    p.test_cases[0].test_method = "exploratory_test";
    auto vs = run(p);
    CHECK(count_rule(vs, RuleId::R10) == 0);
    CHECK(count_rule(vs, RuleId::R6) == 1);

    p = test_helpers::tiny_product();
    p.test_cases[0].test_method = "";
    vs = run(p);
    CHECK(count_rule(vs, RuleId::R10) == 0);
    CHECK(count_rule(vs, RuleId::R9) == 1);
}

TEST_CASE("R11 requires a signal-shaped token in the expected result") {
    WorkProduct p = test_helpers::tiny_product();
    p.test_cases[0].expected_result = "The vehicle stops.";
    auto vs = run(p);
    REQUIRE(count_rule(vs, RuleId::R11) == 1);
    CHECK(vs[0].severity == RuleSeverity::minor);

    p.test_cases[0].expected_result = "brakeRequest goes active";
    CHECK(count_rule(run(p), RuleId::R11) == 0);
    p.test_cases[0].expected_result = "brake_torque_req reaches 3000 Nm";
    CHECK(count_rule(run(p), RuleId::R11) == 0);
    // An empty expected result is R1's finding, not R11's.
    p.test_cases[0].expected_result = "";
    vs = run(p);
    CHECK(count_rule(vs, RuleId::R11) == 0);
    CHECK(has_rule(vs, RuleId::R1, "TC-001"));
}

TEST_CASE("R12 requires a positive FSR time constraint") {
    WorkProduct p = test_helpers::tiny_product();
    p.fsrs[0].ftti_ms = 0;
    auto vs = run(p);
    REQUIRE(count_rule(vs, RuleId::R12) == 1);
    CHECK(has_rule(vs, RuleId::R12, "FSR-001"));
    p.fsrs[0].ftti_ms = -5;
    CHECK(count_rule(run(p), RuleId::R12) == 1);
}

TEST_CASE("R13 requires every present fault category to be exercised") {
    WorkProduct p = test_helpers::tiny_product();
    p.test_cases[0].injected_fault.reset();
    auto vs = run(p);
    REQUIRE(count_rule(vs, RuleId::R13) == 1);
    CHECK(has_rule(vs, RuleId::R13, "document"));
    CHECK(vs[0].message.find("self_failure") != std::string::npos);
}

TEST_CASE("R13 matches categories through free-text classification") {
    WorkProduct p = test_helpers::tiny_product();
    FaultTreeEvent link_event;
    link_event.event_id = "FTA-02";
    link_event.description = "Object list not delivered to the brake node";
    link_event.category = FaultCategory::link_failure;
    link_event.covering_fsr_ids = {"FSR-002"};
    p.fta_events.push_back(link_event);

    auto vs = run(p);
    REQUIRE(count_rule(vs, RuleId::R13) == 1);
    CHECK(vs[0].message.find("link_failure") != std::string::npos);

    p.test_cases[1].injected_fault = "CAN bus message loss for 200 ms";
    CHECK(count_rule(run(p), RuleId::R13) == 0);
}

TEST_CASE("classify_fault_text applies self, link, power precedence") {
    CHECK(classify_fault_text("internal watchdog reset", cfg()) == FaultCategory::self_failure);
    CHECK(classify_fault_text("CAN bus frame corruption", cfg()) == FaultCategory::link_failure);
    CHECK(classify_fault_text("Undervoltage to 6 V", cfg()) == FaultCategory::power_supply_failure);
    CHECK(classify_fault_text("cosmic ray bit flip", cfg()) == FaultCategory::other);
    // "sensor" (self) outranks "timeout" (link).
    CHECK(classify_fault_text("sensor timeout", cfg()) == FaultCategory::self_failure);
    // "communication" (link) outranks "voltage" (power).
    CHECK(classify_fault_text("communication loss after voltage dip", cfg()) ==
          FaultCategory::link_failure);
    CHECK(classify_fault_text("", cfg()) == FaultCategory::other);
}

TEST_CASE("validate output is invariant under artifact permutation") {
    WorkProduct p = test_helpers::tiny_product();
    // Seed several violations across rule families.
    p.fsrs[0].ftti_ms = 0;
    p.test_cases[0].expected_result = "No signal named here.";
    p.fta_events[0].covering_fsr_ids = {};
    p.hazards[0].name = "";
    TestCase dup = p.test_cases[1];
    dup.tc_id = "TC-00X";
    p.test_cases.push_back(dup);

    auto baseline = run(p);
    REQUIRE_FALSE(baseline.empty());
    for (std::uint64_t seed : {1ull, 7ull, 42ull}) {
        WorkProduct shuffled = p;
        seeded_shuffle(shuffled.hazards, seed);
        seeded_shuffle(shuffled.safety_goals, seed + 1);
        seeded_shuffle(shuffled.fsrs, seed + 2);
        seeded_shuffle(shuffled.test_cases, seed + 3);
        seeded_shuffle(shuffled.fta_events, seed + 4);
        CHECK(run(shuffled) == baseline);
    }
}

TEST_CASE("violations are sorted by rule, entity, message") {
    WorkProduct p = test_helpers::tiny_product();
    p.fsrs[1].ftti_ms = 0;
    p.fsrs[0].ftti_ms = 0;
    p.hazards[0].name = "";
    auto vs = run(p);
    REQUIRE(vs.size() == 3);
    CHECK(vs[0].rule_id == RuleId::R1);
    CHECK(vs[1].entity_id == "FSR-001");
    CHECK(vs[2].entity_id == "FSR-002");
}

TEST_CASE("empty entity ids fall back to the document entity") {
    WorkProduct p = test_helpers::tiny_product();
    p.hazards[0].hazard_id = "";
    auto vs = run(p);
    bool found = false;
    for (const auto& v : vs) {
        if (v.message == "hazard id column empty") {
            found = true;
            CHECK(v.entity_id == "document");
        }
    }
    CHECK(found);
}

TEST_CASE("violations json round-trips") {
    WorkProduct p = test_helpers::tiny_product();
    p.fsrs[0].ftti_ms = 0;
    p.fta_events[0].covering_fsr_ids = {};
    auto vs = run(p);
    auto back = violations_from_json(violations_to_json(vs));
    CHECK(back == vs);
    CHECK(violations_from_json("[]").empty());
    CHECK_THROWS_AS((void)violations_from_json("{}"), IoError);
    CHECK_THROWS_AS((void)violations_from_json("not json"), IoError);
}

TEST_CASE("validation config round-trips through json") {
    const ValidationConfig& base = cfg();
    std::string json = base.to_json();
    ValidationConfig back = ValidationConfig::from_json(json);
    CHECK(back.to_json() == json);
    CHECK(back.signal_pattern == base.signal_pattern);
    CHECK(back.method_matrix.size() == base.method_matrix.size());
    CHECK(back.table_schemas.size() == base.table_schemas.size());

    // Behavior equivalence, not just shape.
    WorkProduct p = test_helpers::tiny_product();
    p.test_cases[0].test_method = "exploratory_test";
    CHECK(validate(p, back) == validate(p, base));
}

TEST_CASE("the committed schema file matches the built-in defaults") {
    ValidationConfig repo =
        ValidationConfig::load(test_helpers::repo_path("schema/validation.config"));
    CHECK(repo.to_json() == ValidationConfig::defaults().to_json());
}

TEST_CASE("validation config rejects malformed input") {
    CHECK_THROWS_AS((void)ValidationConfig::from_json("{nope"), ConfigError);
    CHECK_THROWS_AS((void)ValidationConfig::from_json("{}"), ConfigError);

    auto root = nlohmann::json::parse(cfg().to_json());
    root["signal_pattern"] = "(";
    CHECK_THROWS_AS((void)ValidationConfig::from_json(root.dump()), ConfigError);

    root = nlohmann::json::parse(cfg().to_json());
    root["table_schemas"][0]["kind"] = "recipes";
    CHECK_THROWS_AS((void)ValidationConfig::from_json(root.dump()), ConfigError);

    root = nlohmann::json::parse(cfg().to_json());
    root["method_matrix"]["stress_test"]["D"] = "encouraged";
    CHECK_THROWS_AS((void)ValidationConfig::from_json(root.dump()), ConfigError);
}

TEST_CASE("build_traceability reports adjacency and dangling references") {
    WorkProduct p = test_helpers::tiny_product();
    p.fsrs[1].traced_sg_ids = {"SG-01", "SG-77"};
    TestCase orphan;
    orphan.tc_id = "TC-099";
    orphan.traced_fsr_id = "FSR-404";
    orphan.asil = AsilLevel::QM;
    orphan.test_method = "requirements_based_test";
    orphan.derivation_method = "analysis";
    orphan.steps = {"step"};
    orphan.expected_result = "some_signal set";
    p.test_cases.push_back(orphan);

    TraceMatrix m = build_traceability(p);
    REQUIRE(m.sgs.size() == 1);
    CHECK(m.sgs[0].fsr_ids == std::vector<std::string>{"FSR-001", "FSR-002"});
    CHECK(m.sgs_with_fsr == 1);
    REQUIRE(m.fsrs.size() == 2);
    CHECK(m.fsrs[1].dangling_sg_ids == std::vector<std::string>{"SG-77"});
    CHECK(m.fsrs[0].tc_ids == std::vector<std::string>{"TC-001"});
    CHECK(m.fsrs_with_tc == 2);
    REQUIRE(m.tcs.size() == 3);
    CHECK(m.tcs[2].dangling);
    CHECK_FALSE(m.tcs[0].dangling);
    CHECK(m.dangling_count == 2);
    CHECK(m.has_dangling());

    TraceMatrix clean = build_traceability(test_helpers::tiny_product());
    CHECK_FALSE(clean.has_dangling());
}
