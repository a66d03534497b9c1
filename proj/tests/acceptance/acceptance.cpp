// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is 0 when the set of failing criteria equals the set named by
// --expect-red (default: none), so a known, documented failure keeps ctest
// green while any new failure or unexpected pass turns it red.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "oracle.hpp"
#include "pedroute/assign.hpp"

using namespace pedroute;

namespace {

std::string path_of(const std::string& name) { return std::string(PEDROUTE_SCENARIO_DIR) + "/" + name + ".json"; }

struct Prepared {
  Scenario s;
  const Area* origin = nullptr;
  const Area* destination = nullptr;
  RouteSet routes;
  std::vector<bool> aligned;
  Vec2 start;
};

Prepared prepare(const std::string& name, RouteConfig cfg = {}) {
  Prepared p{load_scenario(path_of(name)), nullptr, nullptr, {}, {}, {}};
  p.origin = p.s.areas_with_role(AreaRole::Origin).front();
  p.destination = p.s.areas_with_role(AreaRole::Destination).front();
  p.routes = filter_routes_for_origin(build_routes(p.s, *p.destination, cfg), *p.origin).routes;
  p.start = area_anchor(*p.origin, p.s.cell_size());
  p.aligned = shortest_path_aligned(p.routes, p.start);
  return p;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double limit_s;
  std::function<Outcome()> run;
};

using Clock = std::chrono::steady_clock;

// ---------------------------------------------------------------------------

Outcome single_obstacle() {
  const Prepared p = prepare("single_obstacle");
  const FieldAnalysis fa = analyze(p.s, p.destination->cells, CellMask{}, 4.0, p.destination->id);
  const std::size_t crit = fa.critical_ids().size();
  const Prepared wide = prepare("single_obstacle", {40.0, 4});
  std::ostringstream d;
  d << "d=4: " << p.routes.routes.size() << " routes, " << crit << " critical; d=40: " << wide.routes.routes.size()
    << " route(s)";
  return {p.routes.routes.size() == 3 && crit == 1 && wide.routes.routes.size() == 1, d.str()};
}

Outcome two_obstacles() {
  const Prepared p = prepare("two_obstacles", {4.0, 2});
  const double cs = p.s.cell_size();
  const auto routed = trace_route(p.routes, p.routes.routes.front(), p.start, 0.25 * cs);
  const DistanceField plain = compute_field(p.s, p.destination->cells, CellMask{}, p.destination->id);
  const auto base = trace_descent(plain, p.start, 0.25 * cs, 1000000).points;
  double worst = 0.0;
  for (std::size_t i = 0; i < std::max(routed.size(), base.size()); ++i)
    worst = std::max(worst, (routed[std::min(i, routed.size() - 1)] - base[std::min(i, base.size() - 1)]).norm());
  std::ostringstream d;
  d << p.routes.routes.size() << " routes; direct vs baseline max deviation " << fmt("%.3f", worst / cs) << " cells";
  return {p.routes.routes.size() == 9 && worst <= cs, d.str()};
}

// Order in which a traced route passes the root critical regions.
std::vector<int> critical_visits(const Prepared& p, const FieldAnalysis& fa, const Route& r) {
  const double cs = p.s.cell_size();
  std::vector<int> order;
  for (Vec2 q : trace_route(p.routes, r, p.start, 0.25 * cs)) {
    const int id = fa.graph.label(cell_of(q, cs));
    if (id >= 0 && fa.classes[id] == RegionClass::Critical && std::find(order.begin(), order.end(), id) == order.end())
      order.push_back(id);
  }
  return order;
}

Outcome nested_loops() {
  const Prepared p = prepare("nested_loops");
  const FieldAnalysis fa = analyze(p.s, p.destination->cells, CellMask{}, 4.0, p.destination->id);
  const auto crit = fa.critical_ids();
  bool forward = false, backward = false;
  if (crit.size() == 2) {
    for (const Route& r : p.routes.routes) {
      const auto v = critical_visits(p, fa, r);
      if (v.size() < 2) continue;
      forward = forward || v[0] == crit[0];
      backward = backward || v[0] == crit[1];
    }
  }
  std::ostringstream d;
  d << crit.size() << " critical regions; " << p.routes.routes.size() << " routes; A-then-B " << (forward ? "yes" : "no")
    << ", B-then-A " << (backward ? "yes" : "no");
  return {crit.size() == 2 && forward && backward, d.str()};
}

Outcome example_routes() {
  const Prepared p = prepare("example_network");
  const auto aligned = std::count(p.aligned.begin(), p.aligned.end(), true);
  std::ostringstream d;
  d << p.routes.routes.size() << " routes (want 6), " << aligned << " along the shortest path (want 3):";
  for (std::size_t i = 0; i < p.aligned.size(); ++i)
    if (p.aligned[i]) d << ' ' << p.routes.routes[i].id;
  return {p.routes.routes.size() == 6 && aligned == 3, d.str()};
}

// Shared by criteria 5 and 9.
struct EquilibriumRuns {
  bool done = false;
  std::optional<Prepared> net;
  AssignmentHistory uniform, concentrated;
  AssignParams a;
};
EquilibriumRuns eq;

SimParams congested() {
  SimParams sim;
  sim.demand = 12000.0;
  return sim;
}

void run_equilibrium() {
  if (eq.done) return;
  eq.net.emplace(prepare("example_network"));
  const Prepared& n = *eq.net;
  eq.a.max_iters = 100;
  eq.a.replicates = 4;
  const SimParams sim = congested();
  eq.uniform = run_assignment(n.s, n.routes, *n.origin, uniform_probs(n.routes.routes.size()), sim, eq.a);
  eq.concentrated = run_assignment(n.s, n.routes, *n.origin, concentrated_probs(n.aligned), sim, eq.a);
  eq.done = true;
}

double aligned_share(const AssignmentHistory& h) {
  double sum = 0.0;
  for (std::size_t i = 0; i < eq.net->aligned.size(); ++i)
    if (eq.net->aligned[i]) sum += h.final_probs()[i];
  return sum;
}

Outcome init_invariance() {
  run_equilibrium();
  const double mu = eq.uniform.iterations.back().stats.weighted_mean;
  const double mc = eq.concentrated.iterations.back().stats.weighted_mean;
  const double rel = std::abs(mu - mc) / std::min(mu, mc);
  const double su = aligned_share(eq.uniform), sc = aligned_share(eq.concentrated);
  const bool a = rel <= 0.05;
  const bool b = std::abs(su - sc) <= 0.02;
  // The sixth route (id 5) must end near the floor; without one there is nothing to check.
  bool c = false;
  std::string c_text = "no sixth route";
  if (eq.net->routes.routes.size() > 5) {
    const double p5u = eq.uniform.final_probs()[5], p5c = eq.concentrated.final_probs()[5];
    c = p5u <= 2 * eq.a.epsilon && p5c <= 2 * eq.a.epsilon;
    c_text = "route 5 final " + fmt("%.4f", p5u) + " / " + fmt("%.4f", p5c);
  }
  std::ostringstream d;
  d << "(a) mean " << fmt("%.2f", mu) << " s vs " << fmt("%.2f", mc) << " s, diff " << fmt("%.2f", 100 * rel)
    << "% " << (a ? "ok" : "FAIL") << "; (b) shortest-path share " << fmt("%.3f", su) << " vs " << fmt("%.3f", sc)
    << " " << (b ? "ok" : "FAIL") << "; (c) " << c_text << " " << (c ? "ok" : "FAIL") << "; iterations "
    << eq.uniform.iterations.size() << " (" << to_string(eq.uniform.reason) << ") / " << eq.concentrated.iterations.size()
    << " (" << to_string(eq.concentrated.reason) << ")";
  return {a && b && c, d.str()};
}

// Corridor each measured pedestrian used, judged where the wall is longest.
Outcome symmetry() {
  const Prepared p = prepare("two_corridors");
  SimParams sim;
  sim.demand = 8000.0;
  AssignParams a;
  a.max_iters = 30;
  // Start with nearly everyone sent through the lower corridor.
  std::vector<double> init(p.routes.routes.size(), 0.01);
  init.back() = 1.0 - 0.01 * static_cast<double>(init.size() - 1);
  const AssignmentHistory h = run_assignment(p.s, p.routes, *p.origin, init, sim, a);
  const auto probs = effective_probs(h.final_probs(), a.epsilon);

  Simulation run(p.s, p.routes, *p.origin, probs, sim);
  const double mid_x = 0.5 * p.s.width() * p.s.cell_size();
  const double mid_y = 0.5 * p.s.height() * p.s.cell_size();
  std::vector<int> side;  // -1 unknown, 0 upper, 1 lower
  run.set_trajectory_sink(
      [&](const TrajectoryRow& r) {
        if (static_cast<std::size_t>(r.agent_id) >= side.size()) side.resize(r.agent_id + 1, -1);
        if (side[r.agent_id] < 0 && std::abs(r.position.x - mid_x) < 2.0) side[r.agent_id] = r.position.y > mid_y;
      },
      1);
  while (!run.finished()) run.step();

  double sum[2] = {0, 0};
  int n[2] = {0, 0};
  for (const Agent& ag : run.agents()) {
    if (!ag.arrival_time || *ag.arrival_time < sim.measure_start || *ag.arrival_time > sim.measure_end) continue;
    const int k = static_cast<std::size_t>(ag.id) < side.size() ? side[ag.id] : -1;
    if (k < 0) continue;
    sum[k] += *ag.arrival_time - ag.spawn_time;
    ++n[k];
  }
  const double share = n[0] + n[1] > 0 ? static_cast<double>(n[1]) / (n[0] + n[1]) : 0.0;
  const double t0 = n[0] ? sum[0] / n[0] : 0.0, t1 = n[1] ? sum[1] / n[1] : 0.0;
  const bool pass = std::abs(share - 0.5) <= 0.1 && std::abs(t0 - t1) <= a.stop_spread && n[0] > 0 && n[1] > 0;
  std::ostringstream d;
  d << "lower corridor share " << fmt("%.3f", share) << " (" << n[0] + n[1] << " measured), corridor means "
    << fmt("%.2f", t0) << " / " << fmt("%.2f", t1) << " s; assignment " << h.iterations.size() << " iterations ("
    << to_string(h.reason) << "), route probs";
  for (double q : h.final_probs()) d << ' ' << fmt("%.3f", q);
  return {pass, d.str()};
}

Outcome fmm_oracles() {
  const Scenario open(101, 101, 1.0, std::vector<CellKind>(101 * 101, CellKind::Walkable), {});
  const Cell target[1] = {{0, 0}};
  const DistanceField f = compute_field(open, target, CellMask{});
  double euclid = 0.0;
  for (int y = 0; y < 101; ++y)
    for (int x = 0; x < 101; ++x) {
      const double r = std::hypot(x, y);
      if (r > 5.0) euclid = std::max(euclid, std::abs(f.value({x, y}) - r) / r);
    }
  double dijkstra = 0.0;
  std::size_t mismatch = 0;
  for (const char* name : {"single_obstacle", "two_obstacles", "nested_loops", "example_network", "two_corridors",
                           "offset_obstacle", "two_origins"}) {
    const Scenario s = load_scenario(path_of(name));
    const Area& d = *s.areas_with_role(AreaRole::Destination).front();
    const DistanceField g = compute_field(s, d.cells, CellMask{}, d.id);
    const auto cmp = oracle::compare(g, oracle::dijkstra(s, d.cells, CellMask{}, 16), 5 * s.cell_size());
    dijkstra = std::max(dijkstra, cmp.max_relative);
    mismatch += cmp.reach_mismatch;
  }
  std::ostringstream d;
  d << "open grid max error " << fmt("%.2f", 100 * euclid) << "% (limit 2%); 16-neighbor oracle max "
    << fmt("%.2f", 100 * dijkstra) << "% over 7 maps (limit 3%); reachability mismatches " << mismatch;
  return {euclid <= 0.02 && dijkstra <= 0.03 && mismatch == 0, d.str()};
}

Outcome properties() {
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  };

  AssignParams plain;
  plain.scale_by_route_count = false;
  expect(shift_amount(80.0, 80.0, plain, 3) == 0.0, "zero shift");
  expect(shift_amount(100.0, 60.0, plain, 3) == 0.25, "shift 0.25");
  expect(effective_probs(std::vector<double>{1.0, 0.0, 0.0}, 0.01) == std::vector<double>{0.98, 0.01, 0.01},
         "epsilon floor");

  // Simplex over a short assignment.
  {
    const Prepared p = prepare("single_obstacle");
    SimParams sim;
    sim.demand = 6000;
    sim.duration = 200;
    sim.measure_start = 60;
    sim.measure_end = 200;
    AssignParams a;
    a.max_iters = 10;
    a.stop_spread = 1e-9;
    const auto h = run_assignment(p.s, p.routes, *p.origin, uniform_probs(p.routes.routes.size()), sim, a);
    for (const auto& it : h.iterations)
      for (const auto* v : {&it.probs_before, &it.probs_simulated, &it.probs_after}) {
        expect(std::all_of(v->begin(), v->end(), [](double q) { return q >= 0.0; }), "non-negative probabilities");
        expect(std::abs(std::accumulate(v->begin(), v->end(), 0.0) - 1.0) <= 1e-12, "probabilities sum to 1");
      }
  }

  std::size_t agent_steps = 0, on_obstacle = 0, mask_hits = 0, traces = 0;
  for (const char* name : {"single_obstacle", "two_obstacles", "nested_loops", "example_network", "two_corridors",
                           "offset_obstacle", "two_origins"}) {
    const Prepared p = prepare(name);
    const double cs = p.s.cell_size();

    const DistanceField& root = p.routes.field(p.routes.destination);
    const BandMap b = band(root, 4.0);
    for (int y = 0; y < p.s.height(); ++y)
      for (int x = 0; x < p.s.width(); ++x) expect(b.reachable({x, y}) == root.reachable({x, y}), "band partition");

    std::mt19937_64 rng(2024);
    for (const auto& area : p.routes.areas) {
      const DistanceField& f = p.routes.field(area.id);
      const CellMask mask = virtual_mask(p.routes.parent_field(area), area);
      std::vector<Cell> starts;
      for (int y = 0; y < f.height(); ++y)
        for (int x = 0; x < f.width(); ++x)
          if (f.reachable({x, y})) starts.push_back({x, y});
      std::uniform_int_distribution<std::size_t> pick(0, starts.size() - 1);
      for (int k = 0; k < 100; ++k) {
        const TracedPath t = trace_descent(f, cell_center(starts[pick(rng)], cs), 0.5 * cs, 200000);
        for (Vec2 q : t.points) mask_hits += mask.test(cell_of(q, cs));
        expect(t.reached_target, "mask path reaches its area");
        ++traces;
      }
    }
  }
  {
    const Prepared p = prepare("two_obstacles");
    std::vector<double> probs(p.routes.routes.size(), 1.0 / static_cast<double>(p.routes.routes.size()));
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      SimParams sim;
      sim.demand = 6000;
      sim.duration = 200;
      sim.measure_start = 0;
      sim.measure_end = 200;
      sim.seed = seed;
      run_simulation(p.s, p.routes, *p.origin, probs, sim,
                     [&](const TrajectoryRow& r) {
                       ++agent_steps;
                       on_obstacle += !p.s.walkable(cell_of(r.position, p.s.cell_size()));
                     },
                     1);
    }
  }
  expect(agent_steps >= 100000, "at least 1e5 agent steps");
  expect(on_obstacle == 0, "no obstacle occupancy");
  expect(mask_hits == 0, "mask paths stay outside the mask");

  std::ostringstream d;
  d << agent_steps << " agent steps, " << on_obstacle << " on obstacles; " << traces << " mask traces, " << mask_hits
    << " mask hits";
  std::set<std::string> uniq(failed.begin(), failed.end());
  for (const auto& f : uniq) d << "; violated: " << f;
  return {failed.empty(), d.str()};
}

Outcome spread_decline() {
  run_equilibrium();
  auto check = [](const AssignmentHistory& h, std::ostringstream& d, const char* label) {
    const double first = h.iterations.front().stats.weighted_sd;
    const double last = h.iterations.back().stats.weighted_sd;
    d << label << ' ' << fmt("%.2f", first) << " -> " << fmt("%.2f", last) << " s";
    return last <= first;
  };
  std::ostringstream d;
  d << "weighted SD ";
  const bool u = check(eq.uniform, d, "uniform");
  d << ", ";
  const bool c = check(eq.concentrated, d, "concentrated");
  return {u && c, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> expect_red;
  std::vector<int> only;
  app.add_option("--expect-red", expect_red, "Criteria known to fail")->delimiter(',');
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "route count, single obstacle", 5, single_obstacle},
      {2, "route count, two obstacles", 10, two_obstacles},
      {3, "nested choices", 10, nested_loops},
      {4, "route count, example network", 10, example_routes},
      {5, "equilibrium independent of the start", 900, init_invariance},
      {6, "symmetric corridors", 120, symmetry},
      {7, "distance field oracles", 30, fmm_oracles},
      {8, "exact properties", 120, properties},
      {9, "spread decline", 900, spread_decline},
  };

  std::set<int> red;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    // Criterion 9 reuses the runs of criterion 5, so its own time is small.
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) red.insert(c.id);
    std::cout << (pass ? "PASS" : "FAIL") << "  " << c.id << "  " << c.title << ": " << o.detail << " ["
              << fmt("%.1f", secs) << " s, limit " << c.limit_s << " s" << (in_time ? "" : ", TOO SLOW") << "]"
              << std::endl;
  }
  const std::set<int> expected(expect_red.begin(), expect_red.end());
  std::cout << red.size() << " failing";
  if (!expected.empty()) std::cout << ", expected failing:";
  for (int i : expected) std::cout << ' ' << i;
  std::cout << std::endl;
  return red == expected ? 0 : 1;
}
