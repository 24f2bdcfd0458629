#include <benchmark/benchmark.h>

#include <cmath>

#include "distill/measures.hpp"
#include "distill/optics.hpp"
#include "distill/protocols.hpp"

namespace {

using namespace distill;
using P = Polarization;

ProtocolParams reference_params() {
  ProtocolParams p;
  p.fidelity = 0.75;
  p.alpha2 = 0.25;
  return p;
}

void BM_ApplyPbs(benchmark::State& state) {
  auto reg = ModeRegistry::for_spatials({"a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4"});
  auto phi1 = make_pure(reg, {{0.5, ket_of(*reg, {{"a1", P::H}, {"b1", P::H}})},
                              {std::sqrt(0.75), ket_of(*reg, {{"a1", P::V}, {"b1", P::V}})}});
  auto phi2 = make_pure(reg, {{0.5, ket_of(*reg, {{"a2", P::H}, {"b2", P::H}})},
                              {std::sqrt(0.75), ket_of(*reg, {{"a2", P::V}, {"b2", P::V}})}});
  auto joint = tensor(phi1, phi2);
  auto element = pbs(reg, "a1", "a2", "a3", "a4");
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_element(joint, element));
  }
}
BENCHMARK(BM_ApplyPbs);

void BM_DistillBitflip(benchmark::State& state) {
  const auto params = reference_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(distill_bitflip(params));
  }
}
BENCHMARK(BM_DistillBitflip);

void BM_DistillMultipartite(benchmark::State& state) {
  auto params = reference_params();
  params.parties = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(distill_multipartite(params));
  }
}
BENCHMARK(BM_DistillMultipartite)->Arg(3)->Arg(4)->Arg(5);

void BM_DistillSpdc(benchmark::State& state) {
  auto params = reference_params();
  params.weighting = state.range(0) == 0 ? Weighting::Paper : Weighting::Physical;
  for (auto _ : state) {
    benchmark::DoNotOptimize(distill_spdc(params));
  }
}
BENCHMARK(BM_DistillSpdc)->Arg(0)->Arg(1);

void BM_Concurrence(benchmark::State& state) {
  auto reg = ModeRegistry::for_spatials({"a", "b"});
  MixedEnsemble ens;
  ens.add_branch(0.75, make_pure(reg, {{0.5, ket_of(*reg, {{"a", P::H}, {"b", P::H}})},
                                       {std::sqrt(0.75), ket_of(*reg, {{"a", P::V}, {"b", P::V}})}}));
  ens.add_branch(0.25, make_pure(reg, {{0.5, ket_of(*reg, {{"a", P::H}, {"b", P::V}})},
                                       {std::sqrt(0.75), ket_of(*reg, {{"a", P::V}, {"b", P::H}})}}));
  auto ens_n = ens.normalized();
  for (auto _ : state) {
    benchmark::DoNotOptimize(concurrence(reduce_two_qubit(ens_n, "a", "b")));
  }
}
BENCHMARK(BM_Concurrence);

void BM_McValidate(benchmark::State& state) {
  const auto params = reference_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mc_validate(Protocol::BitFlip, params, static_cast<std::uint64_t>(state.range(0)), 42));
  }
}
BENCHMARK(BM_McValidate)->Arg(1000)->Arg(10000);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}
