// Microbenchmarks for the hot paths: lazy sample evaluation, the response
// channels, and one full mutual-information estimate. Run via the
// ldpe_bench binary; google-benchmark provides main().

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "ldpe/distributions.hpp"
#include "ldpe/ldp.hpp"
#include "ldpe/plugin_estimators.hpp"
#include "ldpe/protocol.hpp"
#include "ldpe/rng.hpp"
#include "ldpe/tree_model.hpp"

namespace {

ldpe::TreeModel bench_model(std::size_t d) {
    ldpe::Rng rng(9001);
    return ldpe::random_tree_model(d, rng);
}

void BM_TreeFullSample(benchmark::State& state) {
    auto model = bench_model(static_cast<std::size_t>(state.range(0)));
    ldpe::CompiledTree tree(model);
    std::uint64_t user = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tree.full_sample(42, user++));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TreeFullSample)->Arg(8)->Arg(20)->Arg(80);

void BM_TreeCoordinate(benchmark::State& state) {
    auto model = bench_model(static_cast<std::size_t>(state.range(0)));
    ldpe::CompiledTree tree(model);
    std::uint64_t user = 0;
    std::size_t v = 0;
    const std::size_t d = tree.d();
    for (auto _ : state) {
        benchmark::DoNotOptimize(tree.coordinate(42, user++, v));
        v = (v + 1) % d;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TreeCoordinate)->Arg(8)->Arg(20)->Arg(80);

void BM_RandomizedResponse(benchmark::State& state) {
    ldpe::Rng rng(9002);
    const std::size_t k = static_cast<std::size_t>(state.range(0));
    ldpe::PrivacyBudget budget{1.0};
    std::size_t v = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ldpe::k_randomized_response(v, k, budget, rng));
        v = (v + 1) % k;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RandomizedResponse)->Arg(2)->Arg(8);

void BM_SipHash20(benchmark::State& state) {
    std::vector<std::uint8_t> buf(20);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<std::uint8_t>(i);
    std::uint64_t k0 = 0x0706050403020100ULL, k1 = 0x0F0E0D0C0B0A0908ULL;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ldpe::siphash24(k0, k1, buf.data(), buf.size()));
        ++buf[0];
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(buf.size()));
}
BENCHMARK(BM_SipHash20);

void BM_AliasSample(benchmark::State& state) {
    auto dist = ldpe::exponential_distribution(static_cast<std::size_t>(state.range(0)));
    ldpe::AliasSampler sampler(dist);
    ldpe::Rng rng(9003);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sampler.sample(rng));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AliasSample)->Arg(16)->Arg(1000);

// One full pairwise mutual-information estimate (its own query batch); the
// per-iteration cost is dominated by n_samples user contacts.
void BM_MiEstimate(benchmark::State& state) {
    auto model = bench_model(20);
    ldpe::Rng pool_rng(9004);
    auto pool = ldpe::pool_from_tree(model, std::uint64_t{1} << 62, pool_rng,
                                     ldpe::PoolMode::sequential);
    auto spec = ldpe::GoodEstimateSpec::make(1.0, 0.25, 0.05, 4, 0.5);
    ldpe::Rng rng(9005);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ldpe::good_mi_estimate(pool, 3, 7, spec, rng));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(spec.n_samples));
    state.counters["users_per_estimate"] = static_cast<double>(spec.n_samples);
}
BENCHMARK(BM_MiEstimate);

}  // namespace

BENCHMARK_MAIN();
