#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

#include "aegis/domain.hpp"

namespace test_helpers {

inline std::string repo_path(const std::string& relative) {
    return std::string(AEGIS_REPO_DIR) + "/" + relative;
}

/// Fresh directory under the build tree's temp area, unique per name.
class TempDir {
public:
    explicit TempDir(const std::string& name) {
        path_ = std::filesystem::temp_directory_path() /
                ("aegis_test_" + name + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

/// Smallest product that passes the full rule catalog: one hazard backing
/// one safety goal, two FSRs, one test case each, one covered fault event.
inline aegis::WorkProduct tiny_product() {
    using namespace aegis;
    WorkProduct p;
    p.requirement_text = "The feature shall brake autonomously on imminent collision.";

    HazardEntry h;
    h.hazard_id = "H-001";
    h.name = "No braking on demand";
    h.failure_mode = "Loss of function";
    h.scenario = "Urban approach at 50 km/h toward a crossing pedestrian";
    h.severity = Severity::S3;
    h.exposure = Exposure::E4;
    h.controllability = Controllability::C3;
    h.asil = AsilLevel::D;
    h.ftti_ms = 100;
    h.safety_goal_id = "SG-01";
    p.hazards.push_back(h);

    SafetyGoal sg;
    sg.sg_id = "SG-01";
    sg.description = "The vehicle shall brake when a collision is imminent.";
    sg.asil = AsilLevel::D;
    sg.ftti_ms = 100;
    sg.source_hazard_ids = {"H-001"};
    p.safety_goals.push_back(sg);

    FunctionalSafetyRequirement f1;
    f1.fsr_id = "FSR-001";
    f1.description = "Detect loss of the radar object stream.";
    f1.safe_state = "Degraded_Mode with warning";
    f1.asil = AsilLevel::D;
    f1.ftti_ms = 50;
    f1.traced_sg_ids = {"SG-01"};
    f1.subsystem = "Radar ECU";
    f1.safety_mechanism = "Heartbeat supervision";
    p.fsrs.push_back(f1);

    FunctionalSafetyRequirement f2 = f1;
    f2.fsr_id = "FSR-002";
    f2.description = "Issue the brake request on confirmed threat.";
    f2.safe_state = "Emergency_Braking engaged";
    f2.subsystem = "Brake ECU";
    f2.safety_mechanism = "Redundant request path";
    p.fsrs.push_back(f2);

    TestCase t1;
    t1.tc_id = "TC-001";
    t1.traced_fsr_id = "FSR-001";
    t1.asil = AsilLevel::D;
    t1.test_method = "fault_injection_test";
    t1.derivation_method = "analysis of requirements";
    t1.steps = {"Blank the radar stream", "Observe the reaction"};
    t1.expected_result = "radar_object_valid cleared within 50 ms";
    t1.injected_fault = "internal sensor fault on the radar output";
    p.test_cases.push_back(t1);

    TestCase t2;
    t2.tc_id = "TC-002";
    t2.traced_fsr_id = "FSR-002";
    t2.asil = AsilLevel::D;
    t2.test_method = "requirements_based_test";
    t2.derivation_method = "boundary values";
    t2.steps = {"Confirm a threat", "Capture the brake request"};
    t2.expected_result = "brake_request set within 80 ms";
    p.test_cases.push_back(t2);

    FaultTreeEvent ev;
    ev.event_id = "FTA-01";
    ev.description = "Radar stops delivering objects";
    ev.category = FaultCategory::self_failure;
    ev.covering_fsr_ids = {"FSR-001"};
    p.fta_events.push_back(ev);

    return p;
}

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace test_helpers
