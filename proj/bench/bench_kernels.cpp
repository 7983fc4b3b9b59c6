// Serial reference kernels against their OpenMP counterparts.

#include <random>

#include <benchmark/benchmark.h>

#include "kinevent/collision.hpp"
#include "kinevent/kinematics.hpp"
#include "kinevent/pipeline.hpp"
#include "../tests/scene.hpp"

using namespace kinevent;

namespace {

std::vector<double> noisy_series(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0, 1);
  std::vector<double> y(n);
  double level = 0.0;
  for (auto& v : y) v = (level += g(rng));
  return y;
}

void BM_WindowSlopesSerial(benchmark::State& state) {
  const auto y = noisy_series(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(window_slopes_serial(y, 15, 30.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_WindowSlopesParallel(benchmark::State& state) {
  const auto y = noisy_series(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(window_slopes(y, 15, 30.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// A crowded frame: vehicles on a grid with random velocities.
std::vector<GroundObservation> crowded_frame(int n) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> vel(-12, 12);
  std::vector<GroundObservation> frame;
  const int side = static_cast<int>(std::ceil(std::sqrt(n)));
  for (int k = 0; k < n; ++k) {
    GroundObservation o;
    o.track_id = k;
    o.position = Vec2(6.0 * (k % side), 6.0 * (k / side));
    o.ground_velocity = Vec2(vel(rng), vel(rng));
    const Vec2 d = o.ground_velocity.normalized(), nrm(-d.y(), d.x());
    const Vec2 hl = 2.25 * d, hw = 0.9 * nrm;
    o.footprint = Quadrangle{{o.position - hl - hw, o.position + hl - hw, o.position + hl + hw,
                              o.position - hl + hw}};
    frame.push_back(o);
  }
  return frame;
}

void BM_CollisionsSerial(benchmark::State& state) {
  const auto frame = crowded_frame(static_cast<int>(state.range(0)));
  const CollisionParams params;
  for (auto _ : state) benchmark::DoNotOptimize(detect_collisions_serial(frame, params));
}

void BM_CollisionsParallel(benchmark::State& state) {
  const auto frame = crowded_frame(static_cast<int>(state.range(0)));
  const CollisionParams params;
  for (auto _ : state) benchmark::DoNotOptimize(detect_collisions(frame, params));
}

std::pair<CameraModel, std::vector<TrackPoint>> busy_scene() {
  const auto cam = testing::make_camera();
  auto scene = testing::make_event_scene(cam, 2.0);
  const double shift = testing::scene_duration(scene);
  const std::size_t n = scene.vehicles.size();
  for (int copy = 1; copy < 4; ++copy) {
    for (std::size_t k = 0; k < n; ++k) {
      VehicleScript v = scene.vehicles[k];
      v.track_id += 100 * copy;
      for (auto& w : v.waypoints) w.t += shift * copy;
      scene.vehicles.push_back(v);
    }
  }
  return {cam, generate_scenario(scene, 3)};
}

void BM_PipelineSerial(benchmark::State& state) {
  const auto [cam, tracks] = busy_scene();
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline_serial({}, cam, tracks));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tracks.size()));
}

void BM_PipelineParallel(benchmark::State& state) {
  const auto [cam, tracks] = busy_scene();
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline({}, cam, tracks));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tracks.size()));
}

}  // namespace

BENCHMARK(BM_WindowSlopesSerial)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_WindowSlopesParallel)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_CollisionsSerial)->Arg(64)->Arg(256);
BENCHMARK(BM_CollisionsParallel)->Arg(64)->Arg(256);
BENCHMARK(BM_PipelineSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PipelineParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
