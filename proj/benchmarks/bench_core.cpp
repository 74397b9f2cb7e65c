#include <benchmark/benchmark.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "asv/dwa.hpp"
#include "asv/dynamics.hpp"
#include "asv/radar.hpp"
#include "asv/vessel_io.hpp"
#include "asv/world.hpp"

using namespace asv;

namespace {

const std::filesystem::path kData = ASV_BENCH_DATA_DIR;

VesselParams ferry() { return load_model_file(kData / "vessels" / "example-ferry.yaml"); }

std::vector<Vec2> ring(int n, double radius) {
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * kPi * i / n;
    pts.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  return pts;
}

}  // namespace

static void BM_Step(benchmark::State& state) {
  const VesselParams p = ferry();
  const auto cmd = ControlCommand::uniform(p.thrusters.size(), 0.8, 0.55);
  const CurrentSpec current(0.3, 1.0);
  SimState s;
  for (auto _ : state) {
    s = step(s, cmd, current, {}, p, 0.02);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Step);

static void BM_Raycast(benchmark::State& state) {
  PcgParams params;
  params.seed = 3;
  const ObstacleWorld world = generate_channel(params);
  const int beams = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(raycast_scan(world, world.spawn(), beams, 200.0));
  state.SetItemsProcessed(state.iterations() * beams);
}
BENCHMARK(BM_Raycast)->Arg(36)->Arg(360)->Arg(1440);

static void BM_Rasterize(benchmark::State& state) {
  RadarConfig config;
  config.image_size = static_cast<int>(state.range(0));
  config.max_range = 200.0;
  config.alpha = 0.03;
  config.beta = 0.02;
  const auto points = ring(360, 80.0);
  for (auto _ : state) benchmark::DoNotOptimize(rasterize(points, config, {0.0, 0.0}));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(points.size()));
}
BENCHMARK(BM_Rasterize)->Arg(128)->Arg(512);

static void BM_PlanStep(benchmark::State& state) {
  const DwaConfig config;
  // Outside the reach of the longest arc so that every candidate stays feasible.
  const auto obstacles = ring(static_cast<int>(state.range(0)), 30.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(plan_step({0.0, 0.0, 0.0}, {1.0, 0.0}, {100.0, 0.0}, obstacles, config, 1.0));
}
BENCHMARK(BM_PlanStep)->Arg(16)->Arg(128)->Arg(1024);

BENCHMARK_MAIN();
