#include "aegis/evaluator.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <numeric>
#include <regex>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "aegis/errors.hpp"
#include "aegis/util.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace aegis {

std::string to_string(ScoreMethod method) {
    return method == ScoreMethod::rule ? "rule" : "judge";
}

std::optional<ScoreMethod> score_method_from_string(const std::string& text) {
    const std::string t = util::trim(util::to_lower(text));
    if (t == "rule") return ScoreMethod::rule;
    if (t == "judge") return ScoreMethod::judge;
    return std::nullopt;
}

double ScoreWeights::weight_for(RuleSeverity severity) const {
    switch (severity) {
        case RuleSeverity::blocking: return blocking;
        case RuleSeverity::major: return major;
        case RuleSeverity::minor: return minor;
    }
    return major;
}

bool is_fsr_rule(RuleId rule) {
    switch (rule) {
        case RuleId::R1:
        case RuleId::R2:
        case RuleId::R3:
        case RuleId::R4:
        case RuleId::R8:
        case RuleId::R12: return true;
        default: return false;
    }
}

ScoreCard rule_score(const std::vector<Violation>& violations, const ScoreWeights& weights) {
    double fsr_deduction = 0.0;
    double tc_deduction = 0.0;
    // Aggregated per rule in catalog order so detail is reorder-invariant.
    struct PerRule {
        std::size_t count = 0;
        double total = 0.0;
    };
    std::array<PerRule, 13> per_rule{};

    for (const auto& violation : violations) {
        const double w = weights.weight_for(violation.severity);
        auto& bucket = per_rule[static_cast<std::size_t>(violation.rule_id)];
        bucket.count += 1;
        bucket.total += w;
        if (is_fsr_rule(violation.rule_id)) {
            fsr_deduction += w;
        } else {
            tc_deduction += w;
        }
    }

    ScoreCard card;
    card.method = ScoreMethod::rule;
    card.fsr_score = std::max(0.0, 100.0 - fsr_deduction);
    card.testcase_score = std::max(0.0, 100.0 - tc_deduction);

    std::string detail;
    for (std::size_t i = 0; i < per_rule.size(); ++i) {
        if (per_rule[i].count == 0) continue;
        const RuleId rule = static_cast<RuleId>(i);
        if (!detail.empty()) detail += "; ";
        detail += to_string(rule) + " " + to_string(rule_severity(rule)) + " x" +
                  std::to_string(per_rule[i].count) + ": -" +
                  util::format_fixed(per_rule[i].total, 0) + " " +
                  (is_fsr_rule(rule) ? "fsr" : "testcase");
    }
    if (detail.empty()) detail = "no deductions";
    card.detail = std::move(detail);
    return card;
}

JudgeRubric JudgeRubric::load(const std::string& dir) {
    const fs::path base(dir);
    JudgeRubric rubric;
    rubric.fsr_criteria = util::read_file((base / "fsr_criteria.md").string());
    rubric.testcase_criteria = util::read_file((base / "testcase_criteria.md").string());
    if (util::trim(rubric.fsr_criteria).empty() || util::trim(rubric.testcase_criteria).empty()) {
        throw ConfigError("rubric files in " + dir + " must not be empty");
    }
    return rubric;
}

std::string anonymized_product_json(const WorkProduct& product) {
    json j = json::parse(to_canonical_json(product));
    j.erase("provenance");
    return j.dump(2) + "\n";
}

namespace {

constexpr const char* kAnswerDirective =
    "Reply with exactly one line in this format and nothing else: "
    "FSR: <integer 0-100> / TC: <integer 0-100>";

bool parse_judge_reply(const std::string& reply, int& fsr, int& tc) {
    static const std::regex pattern(R"(FSR\s*:\s*(\d{1,3})\s*/\s*TC\s*:\s*(\d{1,3}))",
                                    std::regex::icase);
    std::smatch match;
    if (!std::regex_search(reply, match, pattern)) return false;
    fsr = std::stoi(match[1].str());
    tc = std::stoi(match[2].str());
    return fsr <= 100 && tc <= 100;
}

}  // namespace

ScoreCard judge_score(const WorkProduct& product, const JudgeRubric& rubric,
                      ChatBackend& backend, Transcript* transcript) {
    std::string user =
        "# Scoring criteria for the functional safety requirements\n\n" + rubric.fsr_criteria +
        "\n\n# Scoring criteria for the test cases\n\n" + rubric.testcase_criteria +
        "\n\n# Work product\n\n```json\n" + anonymized_product_json(product) +
        "```\n\nScore the functional safety requirements against the first criteria set and "
        "the test cases against the second, each as an integer from 0 to 100.\n" +
        kAnswerDirective;

    CompletionRequest request;
    request.messages = {
        {ChatRole::system,
         "You assess automotive functional safety work products. Score strictly against the "
         "criteria you are given; do not reward material the criteria do not ask for."},
        {ChatRole::user, std::move(user)},
    };
    request.temperature = 0.0;
    request.max_tokens = 256;
    request.tag = "judge";

    Transcript local;
    Transcript& log = transcript ? *transcript : local;

    std::string reply = complete(backend, request, log);
    int fsr = 0;
    int tc = 0;
    if (!parse_judge_reply(reply, fsr, tc)) {
        // One retry: show the judge its malformed reply and restate the format.
        request.messages.push_back({ChatRole::assistant, reply});
        request.messages.push_back(
            {ChatRole::user,
             std::string("Your reply did not match the required format. ") + kAnswerDirective});
        reply = complete(backend, request, log);
        if (!parse_judge_reply(reply, fsr, tc)) {
            throw JudgeFormatError("judge reply unparseable after retry: " +
                                   util::trim(reply).substr(0, 200));
        }
    }

    ScoreCard card;
    card.method = ScoreMethod::judge;
    card.fsr_score = static_cast<double>(fsr);
    card.testcase_score = static_cast<double>(tc);
    card.detail = util::trim(reply);
    return card;
}

namespace {

struct MeanStd {
    double mean = 0.0;
    double std_dev = 0.0;
};

/// Population standard deviation (n divisor).
MeanStd mean_and_std(const std::vector<double>& values) {
    MeanStd out;
    if (values.empty()) return out;
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) /
               static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - out.mean) * (v - out.mean);
    out.std_dev = std::sqrt(sq / static_cast<double>(values.size()));
    return out;
}

}  // namespace

SampleAggregate sample_and_score(const std::vector<WorkProduct>& products, std::size_t n,
                                 std::uint64_t seed, const Scorer& scorer,
                                 unsigned parallelism) {
    if (products.empty()) {
        throw DomainError("cannot sample from an empty population");
    }
    if (!scorer) {
        throw ConfigError("sample_and_score requires a scorer");
    }

    SampleAggregate aggregate;
    std::size_t take = n;
    if (take > products.size()) {
        aggregate.notices.push_back("requested " + std::to_string(n) +
                                    " samples, population has " +
                                    std::to_string(products.size()) + "; sampling all of it");
        take = products.size();
    }

    // Partial Fisher-Yates over index positions; the seeded generator makes
    // the drawn set identical across runs and platforms.
    std::vector<std::size_t> indices(products.size());
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < take; ++i) {
        const std::uint64_t j =
            i + util::next_bounded(state, static_cast<std::uint64_t>(products.size() - i));
        std::swap(indices[i], indices[static_cast<std::size_t>(j)]);
    }
    aggregate.sample_indices.assign(indices.begin(), indices.begin() + static_cast<long>(take));

    aggregate.cards.assign(take, std::nullopt);
    std::vector<std::string> failures(take);

    auto score_slot = [&](std::size_t slot) {
        try {
            aggregate.cards[slot] = scorer(products[aggregate.sample_indices[slot]]);
        } catch (const JudgeFormatError& e) {
            failures[slot] = e.what();  // missing, not zero
        }
    };

    const unsigned workers =
        std::min<unsigned>(std::max(1u, parallelism), static_cast<unsigned>(take));
    if (workers <= 1) {
        for (std::size_t slot = 0; slot < take; ++slot) score_slot(slot);
    } else {
        std::atomic<std::size_t> cursor{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t slot = cursor.fetch_add(1);
                    if (slot >= take) return;
                    try {
                        score_slot(slot);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& thread : pool) thread.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    std::vector<double> fsr_values;
    std::vector<double> tc_values;
    for (std::size_t slot = 0; slot < take; ++slot) {
        if (aggregate.cards[slot].has_value()) {
            fsr_values.push_back(aggregate.cards[slot]->fsr_score);
            tc_values.push_back(aggregate.cards[slot]->testcase_score);
        } else {
            aggregate.notices.push_back("sample " +
                                        std::to_string(aggregate.sample_indices[slot]) +
                                        " unscored: " + failures[slot]);
        }
    }
    aggregate.scored = fsr_values.size();
    if (aggregate.scored == 0) {
        throw DomainError("no sample produced a score");
    }

    const MeanStd fsr = mean_and_std(fsr_values);
    const MeanStd tc = mean_and_std(tc_values);
    aggregate.fsr_mean = fsr.mean;
    aggregate.fsr_std = fsr.std_dev;
    aggregate.testcase_mean = tc.mean;
    aggregate.testcase_std = tc.std_dev;
    return aggregate;
}

ComparisonSummary compare_runs(const std::vector<ScoredRun>& runs) {
    if (runs.empty()) {
        throw DomainError("compare_runs requires at least one scored run");
    }

    std::map<std::tuple<std::string, std::string, std::string>, std::vector<const ScoreCard*>>
        groups;
    for (const auto& run : runs) {
        groups[{run.framework, run.prompt_version, to_string(run.card.method)}].push_back(
            &run.card);
    }

    ComparisonSummary summary;
    for (const auto& [key, cards] : groups) {
        std::vector<double> fsr_values;
        std::vector<double> tc_values;
        fsr_values.reserve(cards.size());
        tc_values.reserve(cards.size());
        for (const ScoreCard* card : cards) {
            fsr_values.push_back(card->fsr_score);
            tc_values.push_back(card->testcase_score);
        }
        const MeanStd fsr = mean_and_std(fsr_values);
        const MeanStd tc = mean_and_std(tc_values);
        ComparisonRow row;
        row.framework = std::get<0>(key);
        row.prompt_version = std::get<1>(key);
        row.method = std::get<2>(key);
        row.fsr_mean = fsr.mean;
        row.fsr_std = fsr.std_dev;
        row.testcase_mean = tc.mean;
        row.testcase_std = tc.std_dev;
        row.n = cards.size();
        summary.rows.push_back(std::move(row));
    }
    return summary;
}

std::string ComparisonSummary::to_csv() const {
    std::string csv = "framework,prompt_version,method,fsr_mean,fsr_std,testcase_mean,"
                      "testcase_std,n\n";
    for (const auto& row : rows) {
        csv += row.framework + "," + row.prompt_version + "," + row.method + "," +
               util::format_fixed(row.fsr_mean, 4) + "," + util::format_fixed(row.fsr_std, 4) +
               "," + util::format_fixed(row.testcase_mean, 4) + "," +
               util::format_fixed(row.testcase_std, 4) + "," + std::to_string(row.n) + "\n";
    }
    return csv;
}

}  // namespace aegis
