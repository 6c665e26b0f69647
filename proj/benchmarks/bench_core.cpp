#include <benchmark/benchmark.h>

#include "qts/generalized_inverse.hpp"
#include "qts/rng.hpp"
#include "qts/toolkit.hpp"

using namespace qts;

namespace {

QTensor make_tensor(std::uint64_t seed, TensorShape shape) {
    Rng rng(seed);
    QTensor t(std::move(shape));
    for (auto& q : t.data()) q = rng.quaternion();
    return t;
}

void BM_einstein_product(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const QTensor a = make_tensor(1, TensorShape({n, n}, {n, n}));
    const QTensor b = make_tensor(2, TensorShape({n, n}, {n, n}));
    for (auto _ : state) {
        benchmark::DoNotOptimize(einstein_product(a, b));
    }
}
BENCHMARK(BM_einstein_product)->Arg(2)->Arg(4)->Arg(6);

void BM_tensor_pinv(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const QTensor a = make_tensor(3, TensorShape({n, n}, {n + 1, n}));
    for (auto _ : state) {
        benchmark::DoNotOptimize(tensor_pinv(a));
    }
}
BENCHMARK(BM_tensor_pinv)->Arg(2)->Arg(4)->Arg(6);

void BM_solve_axb(benchmark::State& state) {
    InstanceSpec spec;
    spec.kind = SystemKind::axb;
    const auto n = static_cast<std::size_t>(state.range(0));
    spec.modes = {{"I", {n, 2}}, {"J", {n}}, {"K", {n}}, {"L", {n, 2}}};
    spec.seed = 5;
    const Instance inst = gen_consistent(spec);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_instance(inst));
    }
}
BENCHMARK(BM_solve_axb)->Arg(2)->Arg(4);

void BM_solve_triple(benchmark::State& state) {
    InstanceSpec spec;
    spec.kind = SystemKind::triple;
    spec.seed = 7;
    const Instance inst = gen_consistent(spec);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_instance(inst));
    }
}
BENCHMARK(BM_solve_triple);

void BM_solve_chain(benchmark::State& state) {
    InstanceSpec spec;
    spec.kind = SystemKind::chain;
    spec.seed = 7;
    const Instance inst = gen_consistent(spec);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_instance(inst));
    }
}
BENCHMARK(BM_solve_chain);

void BM_oracle_triple(benchmark::State& state) {
    InstanceSpec spec;
    spec.kind = SystemKind::triple;
    spec.seed = 7;
    const Instance inst = gen_consistent(spec);
    for (auto _ : state) {
        benchmark::DoNotOptimize(oracle_solve(inst));
    }
}
BENCHMARK(BM_oracle_triple);

} // namespace

BENCHMARK_MAIN();
