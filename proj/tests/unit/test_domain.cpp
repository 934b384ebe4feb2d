#include "doctest.h"

#include <array>
#include <string>
#include <vector>

#include "aegis/domain.hpp"
#include "aegis/errors.hpp"
#include "helpers.hpp"

using namespace aegis;

TEST_CASE("rating parsers accept coded and bare numeric forms") {
    CHECK(severity_from_string("S3") == Severity::S3);
    CHECK(severity_from_string("3") == Severity::S3);
    CHECK(severity_from_string(" s0 ") == Severity::S0);
    CHECK_FALSE(severity_from_string("S4").has_value());
    CHECK_FALSE(severity_from_string("").has_value());
    CHECK_FALSE(severity_from_string("E2").has_value());

    CHECK(exposure_from_string("E4") == Exposure::E4);
    CHECK(exposure_from_string("0") == Exposure::E0);
    CHECK_FALSE(exposure_from_string("E5").has_value());

    CHECK(controllability_from_string("C2") == Controllability::C2);
    CHECK(controllability_from_string("1") == Controllability::C1);
    CHECK_FALSE(controllability_from_string("C4").has_value());
}

TEST_CASE("asil_from_string tolerates prefix, case, and whitespace") {
    CHECK(asil_from_string("D") == AsilLevel::D);
    CHECK(asil_from_string("ASIL C") == AsilLevel::C);
    CHECK(asil_from_string("asil-b") == AsilLevel::B);
    CHECK(asil_from_string(" qm ") == AsilLevel::QM);
    CHECK(asil_from_string("ASIL QM") == AsilLevel::QM);
    CHECK_FALSE(asil_from_string("E").has_value());
    CHECK_FALSE(asil_from_string("").has_value());
    CHECK_FALSE(asil_from_string("ASIL").has_value());
}

TEST_CASE("rating and level to_string round-trip") {
    CHECK(to_string(Severity::S2) == "S2");
    CHECK(to_string(Exposure::E1) == "E1");
    CHECK(to_string(Controllability::C3) == "C3");
    CHECK(to_string(AsilLevel::QM) == "QM");
    CHECK(to_string(AsilLevel::D) == "D");
    for (int s = 0; s <= 3; ++s) {
        auto sev = static_cast<Severity>(s);
        CHECK(severity_from_string(to_string(sev)) == sev);
    }
    for (int a = 0; a <= 4; ++a) {
        auto lvl = static_cast<AsilLevel>(a);
        CHECK(asil_from_string(to_string(lvl)) == lvl);
    }
}

TEST_CASE("determine_asil: any zero rating forces QM") {
    for (int e = 0; e <= 4; ++e)
        for (int c = 0; c <= 3; ++c)
            CHECK(determine_asil(Severity::S0, static_cast<Exposure>(e),
                                 static_cast<Controllability>(c)) == AsilLevel::QM);
    for (int s = 0; s <= 3; ++s)
        for (int c = 0; c <= 3; ++c)
            CHECK(determine_asil(static_cast<Severity>(s), Exposure::E0,
                                 static_cast<Controllability>(c)) == AsilLevel::QM);
    for (int s = 0; s <= 3; ++s)
        for (int e = 0; e <= 4; ++e)
            CHECK(determine_asil(static_cast<Severity>(s), static_cast<Exposure>(e),
                                 Controllability::C0) == AsilLevel::QM);
}

TEST_CASE("determine_asil: nonzero ratings map by index sum") {
    for (int s = 1; s <= 3; ++s) {
        for (int e = 1; e <= 4; ++e) {
            for (int c = 1; c <= 3; ++c) {
                AsilLevel expected;
                switch (s + e + c) {
                    case 10: expected = AsilLevel::D; break;
                    case 9: expected = AsilLevel::C; break;
                    case 8: expected = AsilLevel::B; break;
                    case 7: expected = AsilLevel::A; break;
                    default: expected = AsilLevel::QM; break;
                }
                CHECK(determine_asil(static_cast<Severity>(s), static_cast<Exposure>(e),
                                     static_cast<Controllability>(c)) == expected);
            }
        }
    }
}

TEST_CASE("determine_asil spot checks") {
    CHECK(determine_asil(Severity::S3, Exposure::E4, Controllability::C3) == AsilLevel::D);
    CHECK(determine_asil(Severity::S3, Exposure::E4, Controllability::C2) == AsilLevel::C);
    CHECK(determine_asil(Severity::S3, Exposure::E3, Controllability::C2) == AsilLevel::B);
    CHECK(determine_asil(Severity::S2, Exposure::E3, Controllability::C2) == AsilLevel::A);
    CHECK(determine_asil(Severity::S1, Exposure::E2, Controllability::C1) == AsilLevel::QM);
    CHECK(determine_asil(Severity::S1, Exposure::E4, Controllability::C1) == AsilLevel::QM);
}

TEST_CASE("asil_max joins under QM < A < B < C < D") {
    CHECK(asil_max(AsilLevel::QM, AsilLevel::A) == AsilLevel::A);
    CHECK(asil_max(AsilLevel::D, AsilLevel::B) == AsilLevel::D);
    CHECK(asil_max(AsilLevel::C, AsilLevel::C) == AsilLevel::C);
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; b <= 4; ++b) {
            auto la = static_cast<AsilLevel>(a);
            auto lb = static_cast<AsilLevel>(b);
            CHECK(asil_max(la, lb) == asil_max(lb, la));
            CHECK(asil_max(la, la) == la);
        }
}

TEST_CASE("fault_category_from_string normalizes separators") {
    CHECK(fault_category_from_string("self_failure") == FaultCategory::self_failure);
    CHECK(fault_category_from_string("Self Failure") == FaultCategory::self_failure);
    CHECK(fault_category_from_string("link-failure") == FaultCategory::link_failure);
    CHECK(fault_category_from_string("POWER SUPPLY FAILURE") == FaultCategory::power_supply_failure);
    CHECK(fault_category_from_string("other") == FaultCategory::other);
    CHECK_FALSE(fault_category_from_string("failure").has_value());
    CHECK_FALSE(fault_category_from_string("").has_value());
}

TEST_CASE("merge_safety_goals joins ASIL, takes min FTTI, unions hazards") {
    SafetyGoal a;
    a.sg_id = "SG-01";
    a.description = "Avoid unintended braking.";
    a.asil = AsilLevel::B;
    a.ftti_ms = 200;
    a.source_hazard_ids = {"H-001", "H-002"};

    SafetyGoal b;
    b.sg_id = "SG-02";
    b.description = "Avoid loss of braking.";
    b.asil = AsilLevel::D;
    b.ftti_ms = 100;
    b.source_hazard_ids = {"H-002", "H-003"};

    SafetyGoal m = merge_safety_goals({a, b});
    CHECK(m.sg_id == "SG-01");
    CHECK(m.asil == AsilLevel::D);
    CHECK(m.ftti_ms == 100);
    CHECK(m.source_hazard_ids == std::vector<std::string>{"H-001", "H-002", "H-003"});
    // First goal keeps identity; merged ids are recorded in the description.
    CHECK(m.description.find("Avoid unintended braking.") == 0);
    CHECK(m.description.find("SG-02") != std::string::npos);
}

TEST_CASE("merge_safety_goals of a single goal is that goal") {
    SafetyGoal a;
    a.sg_id = "SG-09";
    a.description = "Keep steering assist available.";
    a.asil = AsilLevel::C;
    a.ftti_ms = 150;
    a.source_hazard_ids = {"H-009"};
    SafetyGoal m = merge_safety_goals({a});
    CHECK(m == a);
}

TEST_CASE("merge_safety_goals rejects an empty list") {
    CHECK_THROWS_AS((void)merge_safety_goals({}), DomainError);
}

TEST_CASE("effective_asil takes the max over traced goals") {
    WorkProduct p = test_helpers::tiny_product();
    SafetyGoal low;
    low.sg_id = "SG-02";
    low.description = "Log degraded events.";
    low.asil = AsilLevel::A;
    low.ftti_ms = 500;
    low.source_hazard_ids = {"H-001"};
    p.safety_goals.push_back(low);

    FunctionalSafetyRequirement fsr = p.fsrs[0];
    fsr.traced_sg_ids = {"SG-02"};
    CHECK(effective_asil(fsr, p) == AsilLevel::A);
    fsr.traced_sg_ids = {"SG-02", "SG-01"};
    CHECK(effective_asil(fsr, p) == AsilLevel::D);
}

TEST_CASE("effective_asil throws on a dangling goal id, naming it") {
    WorkProduct p = test_helpers::tiny_product();
    FunctionalSafetyRequirement fsr = p.fsrs[0];
    fsr.traced_sg_ids = {"SG-01", "SG-99"};
    try {
        (void)effective_asil(fsr, p);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("SG-99") != std::string::npos);
    }
}

TEST_CASE("find helpers return null on miss") {
    WorkProduct p = test_helpers::tiny_product();
    REQUIRE(p.find_safety_goal("SG-01") != nullptr);
    CHECK(p.find_safety_goal("SG-01")->asil == AsilLevel::D);
    CHECK(p.find_safety_goal("SG-77") == nullptr);
    REQUIRE(p.find_fsr("FSR-002") != nullptr);
    CHECK(p.find_fsr("FSR-404") == nullptr);
}

TEST_CASE("canonical JSON round-trips the full product") {
    WorkProduct p = test_helpers::tiny_product();
    p.provenance.topology = "lite";
    p.provenance.prompt_version = "v1";
    p.provenance.backend_id = "scripted";
    p.provenance.timestamp = "2026-08-19T00:00:00Z";

    std::string json = to_canonical_json(p);
    WorkProduct q = workproduct_from_json(json);
    CHECK(q == p);
    // Canonical form is stable under re-serialization.
    CHECK(to_canonical_json(q) == json);
}

TEST_CASE("canonical JSON preserves an absent injected fault") {
    WorkProduct p = test_helpers::tiny_product();
    REQUIRE_FALSE(p.test_cases[1].injected_fault.has_value());
    WorkProduct q = workproduct_from_json(to_canonical_json(p));
    CHECK_FALSE(q.test_cases[1].injected_fault.has_value());
    REQUIRE(q.test_cases[0].injected_fault.has_value());
    CHECK(*q.test_cases[0].injected_fault == *p.test_cases[0].injected_fault);
}

TEST_CASE("canonical JSON ends with a newline and uses two-space indent") {
    WorkProduct p = test_helpers::tiny_product();
    std::string json = to_canonical_json(p);
    REQUIRE_FALSE(json.empty());
    CHECK(json.back() == '\n');
    CHECK(json.find("  \"fsrs\"") != std::string::npos);
}

TEST_CASE("workproduct_from_json rejects malformed input") {
    CHECK_THROWS_AS((void)workproduct_from_json("{not json"), DomainError);
    CHECK_THROWS_AS((void)workproduct_from_json("[]"), DomainError);
}

TEST_CASE("workproduct_from_json rejects out-of-range enum text") {
    WorkProduct p = test_helpers::tiny_product();
    std::string json = to_canonical_json(p);
    auto pos = json.find("\"asil\": \"D\"");
    REQUIRE(pos != std::string::npos);
    json.replace(pos, std::string("\"asil\": \"D\"").size(), "\"asil\": \"Z\"");
    CHECK_THROWS_AS((void)workproduct_from_json(json), DomainError);
}
