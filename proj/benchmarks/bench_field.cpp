#include <benchmark/benchmark.h>

#include "padic/field.hpp"

#include <random>

using namespace padic;

namespace {

void BM_field_mul(benchmark::State& state) {
    auto K = Field::make(state.range(0), (int)state.range(1));
    std::mt19937_64 rng(1);
    Elem a = K->random_elem(rng, 0, 0);
    Elem b = K->random_elem(rng, 0, 0);
    for (auto _ : state) {
        Elem c = a * b;
        benchmark::DoNotOptimize(c);
    }
}
BENCHMARK(BM_field_mul)->Args({2, 1})->Args({3, 1})->Args({3, 2})->Args({2, 4});

void BM_field_inv(benchmark::State& state) {
    auto K = Field::make(state.range(0), (int)state.range(1));
    std::mt19937_64 rng(1);
    Elem a = K->random_elem(rng, 0, 0);
    for (auto _ : state) {
        Elem c = a.inv();
        benchmark::DoNotOptimize(c);
    }
}
BENCHMARK(BM_field_inv)->Args({3, 1})->Args({3, 2});

void BM_coset_reps(benchmark::State& state) {
    auto K = Field::make(3, 2);
    for (auto _ : state) {
        auto reps = K->coset_reps((int)state.range(0));
        benchmark::DoNotOptimize(reps);
    }
}
BENCHMARK(BM_coset_reps)->Arg(2)->Arg(3);

} // namespace
