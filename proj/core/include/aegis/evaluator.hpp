#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aegis/domain.hpp"
#include "aegis/gateway.hpp"
#include "aegis/validation.hpp"

namespace aegis {

enum class ScoreMethod { rule, judge };

std::string to_string(ScoreMethod method);
std::optional<ScoreMethod> score_method_from_string(const std::string& text);

/// Deduction per violation, keyed by severity.
struct ScoreWeights {
    double blocking = 10.0;
    double major = 5.0;
    double minor = 2.0;

    double weight_for(RuleSeverity severity) const;
};

struct ScoreCard {
    double fsr_score = 100.0;
    double testcase_score = 100.0;
    ScoreMethod method = ScoreMethod::rule;
    std::string detail;
};

/// R1-R4, R8, R12 deduct from fsr_score; the rest from testcase_score.
bool is_fsr_rule(RuleId rule);

/// Pure function of the violation multiset: start both categories at 100,
/// deduct the severity weight per violation into the rule's category,
/// floor at 0.
ScoreCard rule_score(const std::vector<Violation>& violations,
                     const ScoreWeights& weights = ScoreWeights{});

/// Criteria text shown to the judge, one file per scored category.
struct JudgeRubric {
    std::string fsr_criteria;
    std::string testcase_criteria;

    /// Reads <dir>/fsr_criteria.md and <dir>/testcase_criteria.md.
    static JudgeRubric load(const std::string& dir);
};

/// The artifact serialization sent to the judge: canonical JSON with the
/// provenance block removed, so nothing identifies which pipeline flavor
/// or prompt revision produced it.
std::string anonymized_product_json(const WorkProduct& product);

/// Asks the backend to score the product against the rubric. The reply
/// must be one line "FSR: <n> / TC: <n>" with both integers in [0,100];
/// one retry on a malformed reply, then JudgeFormatError.
ScoreCard judge_score(const WorkProduct& product, const JudgeRubric& rubric,
                      ChatBackend& backend, Transcript* transcript = nullptr);

using Scorer = std::function<ScoreCard(const WorkProduct&)>;

/// Result of scoring a seeded sample of a product population.
struct SampleAggregate {
    std::vector<std::size_t> sample_indices;  // positions into the population
    // One slot per sampled index; a judge-format failure leaves its slot
    // empty (scored as missing, not zero).
    std::vector<std::optional<ScoreCard>> cards;
    double fsr_mean = 0.0;
    double fsr_std = 0.0;
    double testcase_mean = 0.0;
    double testcase_std = 0.0;
    std::size_t scored = 0;
    std::vector<std::string> notices;
};

/// Draws min(n, population) products without replacement using the seeded
/// deterministic generator, scores each, and aggregates mean and population
/// standard deviation per category. parallelism > 1 fans the scorer out
/// across threads; results are joined by sample index, so the aggregate is
/// identical regardless of scheduling.
SampleAggregate sample_and_score(const std::vector<WorkProduct>& products, std::size_t n,
                                 std::uint64_t seed, const Scorer& scorer,
                                 unsigned parallelism = 1);

/// One scored run, labeled for grouping.
struct ScoredRun {
    std::string framework;       // pipeline flavor the run used
    std::string prompt_version;  // prompt revision the run used
    ScoreCard card;
};

struct ComparisonRow {
    std::string framework;
    std::string prompt_version;
    std::string method;
    double fsr_mean = 0.0;
    double fsr_std = 0.0;
    double testcase_mean = 0.0;
    double testcase_std = 0.0;
    std::size_t n = 0;
};

struct ComparisonSummary {
    std::vector<ComparisonRow> rows;

    /// header + one line per row, numbers fixed to 4 decimals; stable
    /// byte-for-byte for a given input.
    std::string to_csv() const;
};

/// Groups by (framework, prompt_version, method) and reports per-group
/// means and population standard deviations. Rows sorted by that key.
ComparisonSummary compare_runs(const std::vector<ScoredRun>& runs);

}  // namespace aegis
