// Serial reference kernels vs their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <numeric>

#include "rcrc/masking.hpp"
#include "rcrc/pretune.hpp"
#include "synthetic.hpp"

namespace {

using namespace rcrc;

const testing::SyntheticCorpus& corpus() {
    static const testing::SyntheticCorpus c = [] {
        testing::SyntheticShape shape;
        shape.entities = 40;
        shape.pairs_per_entity = 100;
        return testing::make_synthetic_corpus(shape);
    }();
    return c;
}

std::vector<GenTask> tasks() {
    std::vector<GenTask> t;
    for (std::size_t i = 0; i < corpus().qa.size(); ++i) t.push_back({0, i});
    return t;
}

void BM_GenerateSerial(benchmark::State& state) {
    const auto t = tasks();
    const Tokenizer tok;
    GenConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_batch_serial(corpus().qa, corpus().reviews, t, cfg, tok));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * t.size()));
}

void BM_GenerateParallel(benchmark::State& state) {
    const auto t = tasks();
    const Tokenizer tok;
    GenConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_batch(corpus().qa, corpus().reviews, t, cfg, tok));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * t.size()));
}

std::vector<MaskJob> mask_jobs() {
    const auto outcomes = generate_batch(corpus().qa, corpus().reviews, tasks(), GenConfig{}, Tokenizer{});
    std::vector<MaskJob> jobs;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (!outcomes[i].example) continue;
        jobs.push_back({outcomes[i].example->tokens, std::nullopt, i});
    }
    return jobs;
}

void BM_MaskSerial(benchmark::State& state) {
    const auto jobs = mask_jobs();
    const std::vector<std::string> vocab = {"alpha", "beta", "gamma"};
    for (auto _ : state) benchmark::DoNotOptimize(mask_batch_serial(jobs, MaskPolicy{}, vocab));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * jobs.size()));
}

void BM_MaskParallel(benchmark::State& state) {
    const auto jobs = mask_jobs();
    const std::vector<std::string> vocab = {"alpha", "beta", "gamma"};
    for (auto _ : state) benchmark::DoNotOptimize(mask_batch(jobs, MaskPolicy{}, vocab));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * jobs.size()));
}

}  // namespace

BENCHMARK(BM_GenerateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MaskSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MaskParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
