// Microbenchmarks for the hot paths: chunking, retrieval, extraction,
// validation, and scoring. Inputs come from the committed fixtures so the
// numbers track real workloads.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "aegis/evaluator.hpp"
#include "aegis/extract.hpp"
#include "aegis/gateway.hpp"
#include "aegis/kb.hpp"
#include "aegis/orchestrator.hpp"
#include "aegis/prompts.hpp"
#include "aegis/util.hpp"
#include "aegis/validation.hpp"

namespace {

std::string repo(const std::string& rel) { return std::string(AEGIS_REPO_DIR) + "/" + rel; }

const aegis::KnowledgeBase& corpus() {
    static const aegis::KnowledgeBase kb = aegis::ingest_directory(repo("fixtures/corpus"));
    return kb;
}

// The golden scripted run, shared by the extraction and validation
// benchmarks. Built once; benchmarks only read it.
const aegis::RunRecord& golden_record() {
    static const aegis::RunRecord record = [] {
        const auto backend = aegis::ScriptedBackend::from_jsonl(
            aegis::util::read_file(repo("fixtures/golden.jsonl")));
        aegis::RunOptions options;
        options.run_id = "bench-golden";
        options.kb = &corpus();
        return aegis::run_pipeline(aegis::util::read_file(repo("fixtures/aeb_requirement.txt")),
                                   aegis::Topology::make(aegis::TopologyId::max),
                                   aegis::PromptVersion::v3,
                                   aegis::PromptRegistry::load(repo("prompts")), *backend,
                                   options);
    }();
    return record;
}

void bench_chunker(benchmark::State& state) {
    const std::string text(static_cast<std::size_t>(state.range(0)), 'x');
    for (auto _ : state) {
        benchmark::DoNotOptimize(aegis::chunk_document("doc", text));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(bench_chunker)->Arg(2000)->Arg(20000)->Arg(200000);

void bench_retrieve(benchmark::State& state) {
    const aegis::KnowledgeBase& kb = corpus();
    const std::string query = "fault injection test for the brake actuator";
    for (auto _ : state) {
        benchmark::DoNotOptimize(kb.retrieve(query, 4));
    }
}
BENCHMARK(bench_retrieve);

void bench_extract(benchmark::State& state) {
    const aegis::Transcript& transcript = golden_record().transcript;
    // The final planning and test outputs of the recorded run.
    std::vector<std::pair<std::string, std::string>> sources = {
        {"fusa_expert", transcript.entries()[6].response},
        {"vv_engineer", transcript.entries()[8].response},
    };
    const aegis::ValidationConfig config = aegis::ValidationConfig::defaults();
    for (auto _ : state) {
        aegis::ParseReport report;
        benchmark::DoNotOptimize(aegis::extract_workproduct(sources, config, report));
    }
}
BENCHMARK(bench_extract);

void bench_validate(benchmark::State& state) {
    const aegis::WorkProduct& product = golden_record().product;
    const aegis::ValidationConfig config = aegis::ValidationConfig::defaults();
    for (auto _ : state) {
        benchmark::DoNotOptimize(aegis::validate(product, config));
    }
}
BENCHMARK(bench_validate);

void bench_rule_score(benchmark::State& state) {
    std::vector<aegis::Violation> violations;
    for (int i = 0; i < 24; ++i) {
        const auto rule = static_cast<aegis::RuleId>(i % 13);
        violations.push_back({rule, aegis::rule_severity(rule), "FSR-001", "bench"});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(aegis::rule_score(violations));
    }
}
BENCHMARK(bench_rule_score);

}  // namespace

BENCHMARK_MAIN();
