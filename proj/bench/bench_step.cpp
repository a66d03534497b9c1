// Parallel step kernel vs the serial reference on a congested snapshot.
#include <benchmark/benchmark.h>

#include <memory>

#include "pedroute/sim.hpp"

using namespace pedroute;

namespace {

struct Fixture {
  Scenario s;
  RouteSet rs;
  const Area* origin;
  std::vector<double> probs;

  Fixture() : s(load_scenario(PEDROUTE_SCENARIO_DIR "/example_network.json")) {
    origin = s.areas_with_role(AreaRole::Origin).front();
    RouteConfig cfg;
    rs = build_routes(s, *s.areas_with_role(AreaRole::Destination).front(), cfg);
    probs.assign(rs.routes.size(), 1.0 / static_cast<double>(rs.routes.size()));
  }

  std::unique_ptr<Simulation> warm(StepKernel k) const {
    SimParams p;
    p.demand = 11000;
    p.kernel = k;
    auto sim = std::make_unique<Simulation>(s, rs, *origin, probs, p);
    while (sim->time() < 300.0) sim->step();
    return sim;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_Step(benchmark::State& state) {
  const auto kernel = state.range(0) == 0 ? StepKernel::Parallel : StepKernel::Reference;
  auto sim = fixture().warm(kernel);
  for (auto _ : state) {
    if (sim->finished()) {
      state.PauseTiming();
      sim = fixture().warm(kernel);
      state.ResumeTiming();
    }
    sim->step();
  }
  state.SetLabel(kernel == StepKernel::Parallel ? "parallel" : "reference");
}
BENCHMARK(BM_Step)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_Density(benchmark::State& state) {
  const auto sim = fixture().warm(StepKernel::Parallel);
  std::vector<Vec2> pos;
  for (const auto& a : sim->agents())
    if (a.active) pos.push_back(a.position);
  for (auto _ : state) {
    auto c = state.range(0) == 0 ? neighbor_counts_hashed(pos, 1.0) : neighbor_counts_bruteforce(pos, 1.0);
    benchmark::DoNotOptimize(c);
  }
  state.SetLabel((state.range(0) == 0 ? "hashed, " : "brute force, ") + std::to_string(pos.size()) + " agents");
}
BENCHMARK(BM_Density)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
