// Serial reference against the OpenMP kernels. Arg = ball radius.

#include <benchmark/benchmark.h>

#include "auf/green.hpp"
#include "auf/kernels.hpp"

namespace k = auf::kernels;

namespace {

auf::Measure range_two() {
  return auf::Measure({{auf::Word::parse("a"), 0.25}, {auf::Word::parse("b"), 0.25}, {auf::Word::parse("ab"), 0.5}});
}

auf::TransitionMatrix walk(int radius) {
  return auf::build_transition_matrix(range_two(), auf::Domain::ball(radius), auf::QParams(0.5));
}

template <bool Parallel>
void BM_spmv(benchmark::State& state) {
  const auto p = walk(static_cast<int>(state.range(0)));
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(p.size()));
  Eigen::VectorXd y;
  for (auto _ : state) {
    if constexpr (Parallel) k::parallel::spmv(p.entries, x, y); else k::serial::spmv(p.entries, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * p.entries.nonZeros());
}

template <bool Parallel>
void BM_weighted_norm(benchmark::State& state) {
  const auto p = walk(static_cast<int>(state.range(0)));
  const auto haar = p.haar_weights();
  for (auto _ : state) {
    const auto r = Parallel ? k::parallel::weighted_norm(p.entries, haar) : k::serial::weighted_norm(p.entries, haar);
    benchmark::DoNotOptimize(r.norm);
  }
}

template <bool Parallel>
void BM_green_solve(benchmark::State& state) {
  const auto p = walk(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const auto g = Parallel ? k::parallel::green_solve(p.entries) : k::serial::green_solve(p.entries);
    benchmark::DoNotOptimize(g.data());
  }
}

k::ScanInput scan_input(const auf::KernelTable& t) {
  k::ScanInput in;
  in.green = &t.green;
  in.domain = t.domain;
  in.words = t.domain.words();
  for (const auto& x : in.words) in.interior.push_back(t.domain.is_interior(x, t.range) ? 1 : 0);
  return in;
}

template <bool Parallel>
void BM_harnack_scan(benchmark::State& state) {
  const auto t = auf::green_table(walk(static_cast<int>(state.range(0))), auf::Word{});
  const auto in = scan_input(t);
  for (auto _ : state) {
    const auto r = Parallel ? k::parallel::harnack_scan(in) : k::serial::harnack_scan(in);
    benchmark::DoNotOptimize(r.empirical_delta);
  }
}

template <bool Parallel>
void BM_multiplicativity_scan(benchmark::State& state) {
  const auto t = auf::green_table(walk(static_cast<int>(state.range(0))), auf::Word{});
  const auto in = scan_input(t);
  for (auto _ : state) {
    const auto r = Parallel ? k::parallel::multiplicativity_scan(in) : k::serial::multiplicativity_scan(in);
    benchmark::DoNotOptimize(r.upper);
  }
}

}  // namespace

BENCHMARK(BM_spmv<false>)->Arg(10)->Arg(14);
BENCHMARK(BM_spmv<true>)->Arg(10)->Arg(14);
BENCHMARK(BM_weighted_norm<false>)->Arg(10)->Arg(12);
BENCHMARK(BM_weighted_norm<true>)->Arg(10)->Arg(12);
BENCHMARK(BM_green_solve<false>)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_green_solve<true>)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_harnack_scan<false>)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_harnack_scan<true>)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_multiplicativity_scan<false>)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_multiplicativity_scan<true>)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
