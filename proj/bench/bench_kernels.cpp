// Serial vs Parallel timings for each kernel pair and for the library entry
// points that dispatch on Exec. Both lanes share one contract and produce
// bit-identical results; this target only compares throughput. Thread budget
// comes from APERIODICA_THREADS (see kern::thread_count).

#include "aperiodica/kernels.hpp"
#include "aperiodica/measures.hpp"
#include "aperiodica/meyer.hpp"
#include "aperiodica/scheme.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace aperiodica;
using groups::SetDescriptor;
using kern::Exec;

namespace {

const std::vector<double>& sorted_points(std::size_t n) {
    static std::vector<double> xs = [] {
        std::mt19937_64 rng(7);
        std::vector<double> v(1 << 20);
        double x = 0;
        for (auto& e : v) {
            x += 0.5 + (double)(rng() >> 11) * 0x1.0p-53;
            e = x;
        }
        return v;
    }();
    static std::vector<double> cut;
    if (cut.size() != n) cut.assign(xs.begin(), xs.begin() + n);
    return cut;
}

void bm_window_counts(benchmark::State& state, Exec exec) {
    auto n = (std::size_t)state.range(0);
    const auto& xs = sorted_points(n);
    std::vector<double> anchors;
    for (std::size_t i = 0; i < n; i += 4) anchors.push_back(xs[i]);
    for (auto _ : state)
        benchmark::DoNotOptimize(kern::window_counts(xs, anchors, 25.0, exec));
    state.SetItemsProcessed((long long)state.iterations() * (long long)anchors.size());
}

void bm_max_window_count(benchmark::State& state, Exec exec) {
    auto n = (std::size_t)state.range(0);
    const auto& xs = sorted_points(n);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            kern::max_window_count(xs, 50.0, xs.front(), xs.back(), exec));
    state.SetItemsProcessed((long long)state.iterations() * (long long)n);
}

void bm_shift_sup_deviation(benchmark::State& state, Exec exec) {
    auto n = (std::size_t)state.range(0);
    const auto& xs = sorted_points(n);
    long long max_shift = (long long)n / 8;
    for (auto _ : state)
        benchmark::DoNotOptimize(kern::shift_sup_deviation(xs, max_shift, exec));
    state.SetItemsProcessed((long long)state.iterations() * max_shift);
}

void bm_cut_and_project(benchmark::State& state, Exec exec) {
    auto s = cps::Scheme::golden();
    auto w = SetDescriptor::interval(0, 1);
    long long R = state.range(0);
    auto patch = SetDescriptor::interval(-R, R);
    for (auto _ : state) benchmark::DoNotOptimize(cps::cut_and_project(s, w, patch, exec));
}

void bm_character_lift(benchmark::State& state, Exec exec) {
    auto s = cps::Scheme::golden();
    double root5 = std::sqrt(5.0);
    long long bound = state.range(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(cps::character_lift_check(
            s, 0.5 + root5 / 10.0, -0.5 + root5 / 10.0, bound, 1e-9, exec));
    state.SetItemsProcessed((long long)state.iterations() * (2 * bound + 1) * (2 * bound + 1));
}

void bm_upper_density(benchmark::State& state, Exec exec) {
    static auto m = meyer::m_theta(3.14159265358979312, 20000.0);
    groups::VanHoveSpec v(groups::SpaceDescriptor::integers());
    long long n_max = state.range(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(measures::uniform_upper_density(m, v, n_max, exec));
}

void bm_meyer_test(benchmark::State& state, Exec exec) {
    auto s = cps::Scheme::golden();
    long long R = state.range(0);
    static std::map<long long, cps::PointSet> cache;
    auto it = cache.find(R);
    if (it == cache.end())
        it = cache.emplace(R, cps::cut_and_project(s, SetDescriptor::interval(0, 1),
                                                   SetDescriptor::interval(-R, R)))
                 .first;
    for (auto _ : state)
        benchmark::DoNotOptimize(meyer::meyer_test(it->second, 16, exec));
}

#define PAIR(fn, ...)                                                      \
    BENCHMARK_CAPTURE(fn, serial, Exec::Serial)                            \
        ->Unit(benchmark::kMillisecond)                                    \
        ->Args({__VA_ARGS__});                                             \
    BENCHMARK_CAPTURE(fn, parallel, Exec::Parallel)                       \
        ->Unit(benchmark::kMillisecond)                                    \
        ->Args({__VA_ARGS__})

PAIR(bm_window_counts, 1 << 15);
PAIR(bm_max_window_count, 1 << 18);
PAIR(bm_shift_sup_deviation, 1 << 14);
PAIR(bm_cut_and_project, 4000);
PAIR(bm_character_lift, 400);
PAIR(bm_upper_density, 4000);
PAIR(bm_meyer_test, 1500);

#undef PAIR

}  // namespace

BENCHMARK_MAIN();
