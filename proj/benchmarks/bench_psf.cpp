#include <benchmark/benchmark.h>

#include "apsim/psf_bank.hpp"

namespace {

using namespace apsim;

void BM_ExtractBank(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  const int height = width * 3 / 4;
  const DepthPlanSpec plan{{20.0, 60.0}};
  std::map<FrameKey, RgbImage> frames;
  for (int p = 0; p < 2; ++p) {
    for (Channel c : kChannels) frames.emplace(FrameKey{p, c}, synthesize_impulse_grid({height, width, 51, c}));
  }
  for (auto _ : state) benchmark::DoNotOptimize(extract_bank(frames, plan, 51));
}
BENCHMARK(BM_ExtractBank)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_SerializeBank(benchmark::State& state) {
  PsfBank bank("bench", DepthPlanSpec::standard(), 1536, 2048, 51);
  PsfKernel k;
  k.height = k.width = 9;
  k.weights.assign(81, 1.0f / 81);
  bank.fill(k);
  for (auto _ : state) benchmark::DoNotOptimize(deserialize_bank(serialize_bank(bank)));
}
BENCHMARK(BM_SerializeBank)->Unit(benchmark::kMillisecond);

}  // namespace
