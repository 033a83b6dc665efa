#include <benchmark/benchmark.h>

#include <filesystem>

#include "clayems/ems/scheduler.hpp"
#include "clayems/grid/power_flow.hpp"
#include "clayems/integrate/run.hpp"
#include "clayems/io/scenario_io.hpp"

using namespace clayems;

namespace {

const integrate::Scenario& shipped() {
    static const auto sc =
        io::load_scenario(std::filesystem::path(CLAYEMS_DATA_DIR) / "scenarios" / "default" / "scenario.json");
    return sc;
}

void BM_ScheduleLp(benchmark::State& state) {
    const auto& sc = shipped();
    const auto prob = ems::build_schedule_lp(sc.network, sc.forecasts, sc.devices);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ems::solve_lp(prob.lp));
    }
    state.counters["variables"] = static_cast<double>(prob.lp.num_variables());
    state.counters["rows"] = static_cast<double>(prob.lp.num_rows());
}
BENCHMARK(BM_ScheduleLp)->Unit(benchmark::kMillisecond);

void BM_PowerFlowSweep(benchmark::State& state) {
    const auto& sc = shipped();
    const auto sched = ems::optimize_schedule(sc.network, sc.forecasts, sc.devices);
    const auto loads = ems::scheduled_loads(sched, 12, sc.network, sc.forecasts, sc.devices);
    for (auto _ : state) {
        benchmark::DoNotOptimize(grid::solve_power_flow(sc.network, loads, sc.network.u0));
    }
}
BENCHMARK(BM_PowerFlowSweep)->Unit(benchmark::kMicrosecond);

void BM_PowerFlowNewton(benchmark::State& state) {
    const auto& sc = shipped();
    const auto sched = ems::optimize_schedule(sc.network, sc.forecasts, sc.devices);
    const auto loads = ems::scheduled_loads(sched, 12, sc.network, sc.forecasts, sc.devices);
    for (auto _ : state) {
        benchmark::DoNotOptimize(grid::solve_power_flow_newton(sc.network, loads, sc.network.u0));
    }
}
BENCHMARK(BM_PowerFlowNewton)->Unit(benchmark::kMicrosecond);

void BM_PlantStep(benchmark::State& state) {
    const auto& sc = shipped();
    integrate::PlantRunner runner(sc);
    runner.warm_start(1.8e6);
    const control::SetpointCommand cmd{1.8e6, 0.0, 1e12};
    for (auto _ : state) {
        benchmark::DoNotOptimize(runner.step(cmd));
    }
}
BENCHMARK(BM_PlantStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
