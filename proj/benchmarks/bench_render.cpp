#include <random>

#include <benchmark/benchmark.h>

#include "apsim/render.hpp"

namespace {

using namespace apsim;

PsfKernel box_kernel(int support) {
  PsfKernel k;
  k.height = k.width = support;
  k.weights.assign(static_cast<std::size_t>(support) * support, 1.0f / (support * support));
  return k;
}

void BM_FilterImage(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  const int height = width * 3 / 4;
  const int support = static_cast<int>(state.range(1));
  const DepthPlanSpec plan = DepthPlanSpec::standard();
  PsfBank bank("box", plan, height, width, 51);
  bank.fill(box_kernel(support));
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> v(0, 255), raw(800, 10500);
  RgbImage img(width, height);
  for (auto& x : img.data()) x = static_cast<std::uint8_t>(v(rng));
  DepthMap depth(width, height, 0.01);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) depth.raw(r, c) = static_cast<std::uint16_t>(1000 + 50 * (c / 64));
  RenderConfig cfg;
  cfg.workers = 0;
  for (auto _ : state) benchmark::DoNotOptimize(filter_image(img, depth, bank, cfg));
  state.SetItemsProcessed(state.iterations() * width * height);
}
BENCHMARK(BM_FilterImage)->Args({512, 7})->Args({512, 21})->Args({2048, 7})->Unit(benchmark::kMillisecond);

void BM_AddAwgn(benchmark::State& state) {
  const PlanarImage flat(2048, 1536, 100.0f);
  for (auto _ : state) benchmark::DoNotOptimize(add_awgn(flat, {8.0, 7.5, 9.0}, 3));
  state.SetItemsProcessed(state.iterations() * 2048 * 1536 * 3);
}
BENCHMARK(BM_AddAwgn)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
