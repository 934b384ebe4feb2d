#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace aegis {

// Ordinal hazard ratings. The integer value of each enumerator is its
// index in the rating scale, which the ASIL determination sums.
enum class Severity : int { S0 = 0, S1, S2, S3 };
enum class Exposure : int { E0 = 0, E1, E2, E3, E4 };
enum class Controllability : int { C0 = 0, C1, C2, C3 };

enum class AsilLevel : int { QM = 0, A, B, C, D };

std::string to_string(Severity s);
std::string to_string(Exposure e);
std::string to_string(Controllability c);
std::string to_string(AsilLevel a);

std::optional<Severity> severity_from_string(const std::string& text);
std::optional<Exposure> exposure_from_string(const std::string& text);
std::optional<Controllability> controllability_from_string(const std::string& text);
/// Tolerates an "ASIL" prefix and surrounding whitespace: "ASIL B" -> B.
std::optional<AsilLevel> asil_from_string(const std::string& text);

/// S/E/C -> ASIL per the ISO 26262-3 risk graph: any zero-level rating
/// yields QM; otherwise the index sum maps 10->D, 9->C, 8->B, 7->A, <=6->QM.
AsilLevel determine_asil(Severity s, Exposure e, Controllability c);

/// Join under the total order QM < A < B < C < D.
AsilLevel asil_max(AsilLevel a, AsilLevel b);

enum class FaultCategory { self_failure, link_failure, power_supply_failure, other };

std::string to_string(FaultCategory c);
std::optional<FaultCategory> fault_category_from_string(const std::string& text);

struct HazardEntry {
    std::string hazard_id;
    std::string name;
    std::string failure_mode;  // HAZOP guideword result
    std::string scenario;
    Severity severity = Severity::S0;
    Exposure exposure = Exposure::E0;
    Controllability controllability = Controllability::C0;
    AsilLevel asil = AsilLevel::QM;
    std::int64_t ftti_ms = 0;  // 0 means absent; validation flags it
    std::string safety_goal_id;

    bool operator==(const HazardEntry&) const = default;
};

struct SafetyGoal {
    std::string sg_id;
    std::string description;
    AsilLevel asil = AsilLevel::QM;
    std::int64_t ftti_ms = 0;
    std::vector<std::string> source_hazard_ids;

    bool operator==(const SafetyGoal&) const = default;
};

struct FunctionalSafetyRequirement {
    std::string fsr_id;
    std::string description;
    std::string safe_state;
    AsilLevel asil = AsilLevel::QM;
    std::int64_t ftti_ms = 0;
    std::vector<std::string> traced_sg_ids;
    std::string subsystem;
    std::string safety_mechanism;

    bool operator==(const FunctionalSafetyRequirement&) const = default;
};

struct TestCase {
    std::string tc_id;
    std::string traced_fsr_id;
    AsilLevel asil = AsilLevel::QM;
    std::string test_method;
    std::string derivation_method;
    std::vector<std::string> steps;
    std::string expected_result;
    std::optional<std::string> injected_fault;

    bool operator==(const TestCase&) const = default;
};

struct FaultTreeEvent {
    std::string event_id;
    std::string description;
    FaultCategory category = FaultCategory::other;
    std::vector<std::string> covering_fsr_ids;  // may be empty at parse time

    bool operator==(const FaultTreeEvent&) const = default;
};

struct Provenance {
    std::string topology;
    std::string prompt_version;
    std::string backend_id;
    std::string timestamp;  // ISO-8601 UTC

    bool operator==(const Provenance&) const = default;
};

/// The full bundle one pipeline run produces. Cross-reference integrity is
/// deliberately not enforced here; the validator reports defects so that
/// imperfect model output stays representable.
struct WorkProduct {
    std::string requirement_text;
    std::vector<HazardEntry> hazards;
    std::vector<SafetyGoal> safety_goals;
    std::vector<FunctionalSafetyRequirement> fsrs;
    std::vector<TestCase> test_cases;
    std::vector<FaultTreeEvent> fta_events;
    Provenance provenance;

    bool operator==(const WorkProduct&) const = default;

    const SafetyGoal* find_safety_goal(const std::string& sg_id) const;
    const FunctionalSafetyRequirement* find_fsr(const std::string& fsr_id) const;
};

/// Collapses similar safety goals: ASIL is the join over inputs, FTTI the
/// minimum, hazard sets the union. Identity fields come from the first
/// input, with the other merged ids appended to the description.
/// Similarity is the caller's judgment; throws DomainError on an empty list.
SafetyGoal merge_safety_goals(const std::vector<SafetyGoal>& goals);

/// Highest ASIL over the FSR's traced safety goals.
/// Throws DomainError naming the first dangling sg_id.
AsilLevel effective_asil(const FunctionalSafetyRequirement& fsr, const WorkProduct& product);

/// Canonical single-document JSON form: one array per artifact kind,
/// snake_case field names, sorted keys, two-space indent.
std::string to_canonical_json(const WorkProduct& product);
WorkProduct workproduct_from_json(const std::string& json_text);

}  // namespace aegis
