// Serial reference kernels against their OpenMP versions on the MNIST
// network shape and the spike-sorting k-means assignment.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "dendra/classifier.hpp"
#include "dendra/kernels.hpp"
#include "dendra/numeric.hpp"

using namespace dendra;

namespace {

SdpParams mnist_params() {
  return SdpParams::from_real({1, 1}, {9, 16}, {0, 1}, {12, 1}, {8, 1}, {30, 1}, 256);
}

std::vector<SpikeVector> contexts(std::size_t groups, std::size_t inputs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SpikeVector> out;
  for (std::size_t g = 0; g < groups; ++g) {
    std::vector<std::uint8_t> bits(inputs);
    for (std::size_t i = 0; i < inputs; i += 2) {
      bits[i] = rng() & 1;
      bits[i + 1] = 1 - bits[i];
    }
    out.push_back(SpikeVector::from_bits(bits));
  }
  return out;
}

template <bool Parallel>
void BM_Votes(benchmark::State& state) {
  auto net = build_network(576, 10, static_cast<std::size_t>(state.range(0)), 18, mnist_params());
  auto ctx = contexts(576, 18, 1);
  std::vector<std::uint8_t> votes(net.shape().unit_count());
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::votes_parallel(net, ctx, votes);
    else
      kernels::votes_serial(net, ctx, votes);
    benchmark::DoNotOptimize(votes.data());
  }
  state.counters["threads"] = kernels::max_threads();
}

template <bool Parallel>
void BM_Supervise(benchmark::State& state) {
  auto net = build_network(576, 10, static_cast<std::size_t>(state.range(0)), 18, mnist_params());
  std::vector<std::vector<SpikeVector>> stream;
  for (std::uint64_t s = 0; s < 16; ++s) stream.push_back(contexts(576, 18, s));
  std::vector<std::uint8_t> votes(net.shape().unit_count());
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& ctx = stream[i % stream.size()];
    if constexpr (Parallel)
      kernels::supervise_parallel(net, ctx, i % 10, votes);
    else
      kernels::supervise_serial(net, ctx, i % 10, votes);
    ++i;
  }
  state.counters["threads"] = kernels::max_threads();
}

template <bool Parallel>
void BM_AssignNearest(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::vector<SpikeVector> patterns;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint8_t> bits(416, 0);
    for (std::size_t c = 0; c < 13; ++c)
      for (std::size_t r = 0, v = rng() % 30; r < 3; ++r) bits[(v + r) * 13 + c] = 1;
    patterns.push_back(SpikeVector::from_bits(bits));
  }
  std::vector<Centroid> cs;
  for (std::size_t k = 0; k < 6; ++k) cs.push_back(centroid_of(std::span(patterns).subspan(k * 10, 10)));
  std::vector<std::size_t> out(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::assign_nearest_parallel(patterns, cs, out);
    else
      kernels::assign_nearest_serial(patterns, cs, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

}  // namespace

BENCHMARK(BM_Votes<false>)->Name("votes/serial")->Arg(4)->Arg(16);
BENCHMARK(BM_Votes<true>)->Name("votes/parallel")->Arg(4)->Arg(16);
BENCHMARK(BM_Supervise<false>)->Name("supervise/serial")->Arg(4)->Arg(16);
BENCHMARK(BM_Supervise<true>)->Name("supervise/parallel")->Arg(4)->Arg(16);
BENCHMARK(BM_AssignNearest<false>)->Name("assign_nearest/serial")->Arg(10390);
BENCHMARK(BM_AssignNearest<true>)->Name("assign_nearest/parallel")->Arg(10390);

BENCHMARK_MAIN();
