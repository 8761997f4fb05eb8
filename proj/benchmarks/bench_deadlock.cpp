#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bdead/cbc.hpp"
#include "bdead/kernel/solve.hpp"
#include "bdead/mc.hpp"

using namespace bdead;

namespace {

model::TypedMachine load(const std::string& rel) {
  std::ifstream in(std::filesystem::path(BDEAD_BENCH_DATA) / rel);
  std::ostringstream ss;
  ss << in.rdbuf();
  return model::typecheck(model::parse_machine(ss.str()));
}

// Process scheduler with n process identifiers.
model::TypedMachine scheduler(int n) {
  std::ostringstream os;
  os << "MACHINE Scheduler" << n << "\nSETS PID = {";
  for (int i = 1; i <= n; ++i) os << (i > 1 ? ", " : "") << "p" << i;
  os << "}\nVARIABLES active, ready, waiting\nINVARIANTS\n"
        "  active <: PID ; ready <: PID ; waiting <: PID ; card(active) <= 1 ;\n"
        "  ready /\\ waiting = {} ; active /\\ (ready \\/ waiting) = {} ; active = {} => ready = {}\n"
        "EVENTS\n"
        "  INITIALISATION = BEGIN active := {} || ready := {} || waiting := {} END ;\n"
        "  new = ANY pp WHEN pp : PID & pp /: active & pp /: ready & pp /: waiting THEN waiting := waiting \\/ {pp} END ;\n"
        "  del = ANY pp WHEN pp : waiting THEN waiting := waiting \\ {pp} END ;\n"
        "  ready_idle = ANY rr WHEN rr : waiting & active = {} THEN waiting := waiting \\ {rr} || active := {rr} END ;\n"
        "  ready_busy = ANY rr WHEN rr : waiting & active /= {} THEN waiting := waiting \\ {rr} || ready := ready \\/ {rr} END ;\n"
        "  swap_idle = WHEN active /= {} & ready = {} THEN waiting := waiting \\/ active || active := {} END ;\n"
        "  swap = ANY pp WHEN active /= {} & pp : ready THEN waiting := waiting \\/ active || active := {pp} || ready := ready \\ {pp} END\n"
        "END\n";
  return model::typecheck(model::parse_machine(os.str()));
}

void BM_CbcScheduler(benchmark::State& state) {
  const auto m = scheduler(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cbc::check_deadlock(m).verdict);
}
BENCHMARK(BM_CbcScheduler)->DenseRange(2, 9)->Unit(benchmark::kMillisecond);

void BM_McScheduler(benchmark::State& state) {
  const auto m = scheduler(static_cast<int>(state.range(0)));
  std::uint64_t visited = 0;
  for (auto _ : state) {
    const auto r = mc::model_check(m);
    visited = r.states_visited;
  }
  state.counters["states"] = static_cast<double>(visited);
}
BENCHMARK(BM_McScheduler)->DenseRange(2, 8)->Unit(benchmark::kMillisecond);

void BM_CbcMinSet(benchmark::State& state) {
  const auto m = load("corpus/minset_v2.mch");
  cbc::CheckOptions opts;
  opts.simplify = state.range(0) & 1;
  opts.sort = state.range(0) & 2;
  opts.partition = state.range(0) & 4;
  for (auto _ : state) benchmark::DoNotOptimize(cbc::check_deadlock(m, opts).verdict);
}
BENCHMARK(BM_CbcMinSet)->Arg(7)->Arg(6)->Arg(5)->Arg(3)->Arg(0)->Unit(benchmark::kMicrosecond);

void BM_Queens8(benchmark::State& state) {
  const auto m = load("models/queens8.mch");
  const kernel::Scope scope{m->sorts, m.scope()};
  const auto p = model::invariants_predicate(m.machine());
  for (auto _ : state) benchmark::DoNotOptimize(kernel::solve(p, scope).outcome);
}
BENCHMARK(BM_Queens8)->Unit(benchmark::kMillisecond);

void BM_CbcCounterFilter(benchmark::State& state) {
  const auto m = load("models/counter.mch");
  cbc::CheckOptions opts;
  opts.goal = model::typecheck_predicate(model::parse_predicate("Counter = 10"), m);
  opts.filter = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(cbc::check_deadlock(m, opts).verdict);
}
BENCHMARK(BM_CbcCounterFilter)->Arg(1)->Arg(0)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
