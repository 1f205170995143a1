#include <string>

#include <benchmark/benchmark.h>

#include "fleetgame/demand.hpp"
#include "fleetgame/equilibrium.hpp"
#include "fleetgame/harness.hpp"
#include "fleetgame/io.hpp"

namespace {

using namespace fleetgame;

Json scenario_file(const std::string& name) {
  return io::load_file(std::string(FLEETGAME_SOURCE_DIR) + "/scenarios/" + name + ".json");
}

PropertyCheckOptions grid(benchmark::State& state) {
  PropertyCheckOptions o;
  o.grid_resolution = static_cast<std::size_t>(state.range(0));
  return o;
}

void BM_PropertiesParallel(benchmark::State& state) {
  const DemandFunction f = DemandFunction::bilinear();
  const PropertyCheckOptions o = grid(state);
  for (auto _ : state) benchmark::DoNotOptimize(check_properties(f, o));
}

void BM_PropertiesSerial(benchmark::State& state) {
  const DemandFunction f = DemandFunction::bilinear();
  const PropertyCheckOptions o = grid(state);
  for (auto _ : state) benchmark::DoNotOptimize(check_properties_serial(f, o));
}

void BM_SweepParallel(benchmark::State& state) {
  const SweepSpec s = io::sweep_from_json(scenario_file("sweep-alpha"));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(s));
}

void BM_SweepSerial(benchmark::State& state) {
  const SweepSpec s = io::sweep_from_json(scenario_file("sweep-alpha"));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_serial(s));
}

void BM_MultistartParallel(benchmark::State& state) {
  const ScenarioSpec s = io::scenario_from_json(scenario_file("table-iv"));
  for (auto _ : state) benchmark::DoNotOptimize(multistart(s, static_cast<int>(state.range(0))));
}

void BM_MultistartSerial(benchmark::State& state) {
  const ScenarioSpec s = io::scenario_from_json(scenario_file("table-iv"));
  for (auto _ : state) benchmark::DoNotOptimize(multistart_serial(s, static_cast<int>(state.range(0))));
}

}  // namespace

BENCHMARK(BM_PropertiesParallel)->Arg(51)->Arg(201)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PropertiesSerial)->Arg(51)->Arg(201)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultistartParallel)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultistartSerial)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
