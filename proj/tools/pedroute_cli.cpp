// pedroute: route extraction, simulation and iterated assignment on raster maps.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pedroute/assign.hpp"
#include "pedroute/render.hpp"
#include "pedroute/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pedroute;

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kInputError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string scenario;
  std::string out_dir = "out";
  std::string origin;
  std::string destination;
  RouteConfig routes;
  SimParams sim;
  AssignParams assign;
  bool literal_shift = false;
  std::string init = "uniform";
  std::vector<double> probs;
  std::string trajectory;
  int trajectory_every = 10;
};

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  Scenario scenario;
  std::string digest;
};

Loaded load(const Options& o) {
  const std::string text = read_file(o.scenario);
  Loaded l{parse_scenario(text), {}};
  std::ostringstream hex;
  hex << std::hex << fnv1a(text);
  l.digest = hex.str();
  const auto problems = validate(l.scenario);
  if (!problems.empty()) throw InputError(o.scenario + ": " + problems.front());
  return l;
}

const Area& pick(const Scenario& s, const std::string& id, AreaRole role) {
  if (!id.empty()) {
    const Area* a = s.find_area(id);
    if (!a || a->role != role) throw InputError("no " + std::string(role == AreaRole::Origin ? "origin" : "destination") +
                                                " area named '" + id + "'");
    return *a;
  }
  return *s.areas_with_role(role).front();
}

void prepare_out_dir(const Options& o) {
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec) throw InputError("cannot create output directory '" + o.out_dir + "'");
}

std::string out_path(const Options& o, const std::string& name) { return (fs::path(o.out_dir) / name).string(); }

void write_manifest(const Options& o, const std::string& command, const Loaded& l, const json& extra = json::object()) {
  json m;
  m["command"] = command;
  m["scenario"] = o.scenario;
  m["scenario_fnv1a"] = l.digest;
  m["origin"] = o.origin;
  m["destination"] = o.destination;
  m["band_width_m"] = o.routes.band_width;
  m["max_depth"] = o.routes.max_depth;
  m["sim"] = {{"dt_s", o.sim.dt},
              {"v0_mean", o.sim.v0_mean},
              {"v0_sd", o.sim.v0_sd},
              {"rho_max", o.sim.rho_max},
              {"density_radius_m", o.sim.density_radius},
              {"demand_per_h", o.sim.demand},
              {"duration_s", o.sim.duration},
              {"measure_window_s", {o.sim.measure_start, o.sim.measure_end}},
              {"seed", o.sim.seed}};
  m["assign"] = {{"delta", o.assign.delta},
                 {"epsilon", o.assign.epsilon},
                 {"damping", o.assign.damping},
                 {"stop_spread_s", o.assign.stop_spread},
                 {"max_iters", o.assign.max_iters},
                 {"scale_by_route_count", o.assign.scale_by_route_count},
                 {"replicates", o.assign.replicates}};
  m["init"] = o.init;
  if (!o.probs.empty()) m["probs"] = o.probs;
  m.update(extra);
  write_text(out_path(o, "manifest.json"), m.dump(2) + "\n");
}

struct Prepared {
  Loaded loaded;
  const Area* origin;
  const Area* destination;
  RouteSet routes;
  std::vector<bool> aligned;
  std::vector<std::string> warnings;
};

Prepared prepare_routes(const Options& o) {
  Prepared p{load(o), nullptr, nullptr, {}, {}, {}};
  const Scenario& s = p.loaded.scenario;
  p.origin = &pick(s, o.origin, AreaRole::Origin);
  p.destination = &pick(s, o.destination, AreaRole::Destination);
  const RouteSet all = build_routes(s, *p.destination, o.routes);
  FilteredRoutes f = filter_routes_for_origin(all, *p.origin);
  p.routes = std::move(f.routes);
  p.warnings = std::move(f.warnings);
  p.aligned = shortest_path_aligned(p.routes, area_anchor(*p.origin, s.cell_size()));
  return p;
}

void write_renders(const Options& o, const Prepared& p) {
  const Scenario& s = p.loaded.scenario;
  const DistanceField& root = p.routes.field(p.routes.destination);
  write_pgm(render_field(root), out_path(o, "field.pgm"));
  write_pgm(render_modulo(root, o.routes.band_width), out_path(o, "field_mod.pgm"));
  const RegionGraph g = extract_regions(band(root, o.routes.band_width));
  write_ppm(render_regions(s, g, classify(g)), out_path(o, "regions.ppm"));
  write_text(out_path(o, "routes.svg"), routes_svg(s, p.routes, area_anchor(*p.origin, s.cell_size())));
}

std::vector<double> initial_probs(const Options& o, const Prepared& p) {
  const std::size_t n = p.routes.routes.size();
  if (o.init == "uniform") return uniform_probs(n);
  if (o.init == "concentrated") return concentrated_probs(p.aligned);
  if (o.probs.size() != n)
    throw InputError("--probs needs " + std::to_string(n) + " values, got " + std::to_string(o.probs.size()));
  double sum = 0.0;
  for (double q : o.probs) {
    if (q < 0.0) throw InputError("--probs values must be non-negative");
    sum += q;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InputError("--probs values must sum to 1");
  return o.probs;
}

void print_routes(const RouteSet& rs, const std::vector<bool>& aligned) {
  std::cout << rs.routes.size() << (rs.routes.size() == 1 ? " route" : " routes") << "\n";
  for (std::size_t i = 0; i < rs.routes.size(); ++i) {
    const Route& r = rs.routes[i];
    std::cout << "  route " << r.id << ":";
    for (const auto& l : r.legs) std::cout << ' ' << l;
    std::cout << " -> " << rs.destination << (aligned[i] ? "  [shortest path]" : "") << "\n";
  }
}

int cmd_routes(const Options& o) {
  prepare_out_dir(o);
  const Prepared p = prepare_routes(o);
  for (const auto& w : p.warnings) std::cerr << "warning: " << w << "\n";
  write_text(out_path(o, "routes.json"), routes_json(p.loaded.scenario, p.routes, p.aligned).dump(2) + "\n");
  write_renders(o, p);
  write_manifest(o, "routes", p.loaded);
  print_routes(p.routes, p.aligned);
  return 0;
}

int cmd_render(const Options& o) {
  prepare_out_dir(o);
  const Prepared p = prepare_routes(o);
  write_renders(o, p);
  write_manifest(o, "render", p.loaded);
  std::cout << "wrote field.pgm field_mod.pgm regions.ppm routes.svg to " << o.out_dir << "\n";
  return 0;
}

int cmd_simulate(const Options& o) {
  prepare_out_dir(o);
  const Prepared p = prepare_routes(o);
  const auto probs = initial_probs(o, p);
  std::ofstream traj;
  TrajectorySink sink;
  if (!o.trajectory.empty()) {
    traj.open(out_path(o, o.trajectory));
    if (!traj) throw InputError("cannot write trajectory file '" + o.trajectory + "'");
    traj << "time_s,agent_id,x_m,y_m,route_id,leg_index\n";
    sink = [&traj](const TrajectoryRow& r) {
      traj << r.time << ',' << r.agent_id << ',' << r.position.x << ',' << r.position.y << ',' << r.route_id << ','
           << r.leg_index << '\n';
    };
  }
  const SimResult r = run_simulation(p.loaded.scenario, p.routes, *p.origin, probs, o.sim, sink, o.trajectory_every);
  json j = sim_result_json(r);
  j["probs"] = probs;
  write_text(out_path(o, "sim.json"), j.dump(2) + "\n");
  write_manifest(o, "simulate", p.loaded, {{"effective_probs", probs}});
  std::cout << "measured " << r.measured << " of " << r.spawned << " spawned; weighted mean " << r.weighted_mean
            << " s, weighted sd " << r.weighted_sd << " s\n";
  for (const auto& st : r.routes) {
    std::cout << "  route " << st.route_id << ": n=" << st.count;
    if (st.defined) std::cout << " mean=" << st.mean << " s sd=" << st.sd << " s";
    std::cout << "\n";
  }
  return 0;
}

int cmd_assign(const Options& o) {
  prepare_out_dir(o);
  const Prepared p = prepare_routes(o);
  const auto init = initial_probs(o, p);
  AssignParams a = o.assign;
  a.scale_by_route_count = !o.literal_shift;
  const AssignmentHistory h =
      run_assignment(p.loaded.scenario, p.routes, *p.origin, init, o.sim, a, [](const IterationRecord& it) {
        std::cerr << "iteration " << it.iteration << ": mean " << it.stats.weighted_mean << " s, spread "
                  << it.extremes.t_max - it.extremes.t_min << " s, shift " << it.shift << (it.damped ? " (damped)" : "")
                  << "\n";
      });
  write_text(out_path(o, "history.csv"), history_csv(h));
  write_text(out_path(o, "summary.json"), summary_json(h).dump(2) + "\n");
  write_text(out_path(o, "routes.json"), routes_json(p.loaded.scenario, p.routes, p.aligned).dump(2) + "\n");
  write_manifest(o, "assign", p.loaded, {{"initial_probs", init}});
  std::cout << "stopped after " << h.iterations.size() << " iterations: " << to_string(h.reason) << "\n";
  const auto& fp = h.final_probs();
  for (std::size_t i = 0; i < fp.size(); ++i) std::cout << "  route " << h.route_ids[i] << ": " << fp[i] << "\n";
  std::cout << "weighted mean " << h.iterations.back().stats.weighted_mean << " s\n";
  return 0;
}

void add_common(CLI::App* c, Options& o) {
  c->add_option("--scenario,scenario", o.scenario, "Scenario JSON file")->required();
  c->add_option("--out-dir", o.out_dir, "Directory for all artifacts")->capture_default_str();
  c->add_option("--origin", o.origin, "Origin area id (default: first origin)");
  c->add_option("--destination", o.destination, "Destination area id (default: first destination)");
  c->add_option("--band-width", o.routes.band_width, "Band width d in meters")->capture_default_str();
  c->add_option("--max-depth", o.routes.max_depth, "Recursion depth limit")->capture_default_str();
}

void add_sim(CLI::App* c, Options& o) {
  c->add_option("--demand", o.sim.demand, "Arrivals per hour")->capture_default_str();
  c->add_option("--seed", o.sim.seed, "Random seed")->capture_default_str();
  c->add_option("--dt", o.sim.dt, "Time step in seconds")->capture_default_str();
  c->add_option("--duration", o.sim.duration, "Simulated seconds")->capture_default_str();
  c->add_option("--measure-start", o.sim.measure_start, "Window start, s")->capture_default_str();
  c->add_option("--measure-end", o.sim.measure_end, "Window end, s")->capture_default_str();
  c->add_option("--v0-mean", o.sim.v0_mean, "Mean free speed, m/s")->capture_default_str();
  c->add_option("--v0-sd", o.sim.v0_sd, "Free speed standard deviation, m/s")->capture_default_str();
  c->add_option("--rho-max", o.sim.rho_max, "Jam density, persons per square meter")->capture_default_str();
  c->add_option("--density-radius", o.sim.density_radius, "Density radius, m")->capture_default_str();
  c->add_option("--init", o.init, "Initial route probabilities")
      ->check(CLI::IsMember({"uniform", "concentrated", "list"}))
      ->capture_default_str();
  c->add_option("--probs", o.probs, "Probabilities for --init list, in route order")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Route alternatives and iterated assignment for pedestrian simulation"};
  app.require_subcommand(1);
  Options o;

  auto* routes = app.add_subcommand("routes", "Extract intermediate destinations and routes");
  add_common(routes, o);
  auto* render = app.add_subcommand("render", "Write field, band and region renders");
  add_common(render, o);
  auto* simulate = app.add_subcommand("simulate", "Run one simulation with fixed route probabilities");
  add_common(simulate, o);
  add_sim(simulate, o);
  simulate->add_option("--trajectory", o.trajectory, "CSV file name for agent positions");
  simulate->add_option("--trajectory-every", o.trajectory_every, "Record every n-th step")->capture_default_str();
  auto* assign = app.add_subcommand("assign", "Iterated assignment until equilibrium");
  add_common(assign, o);
  add_sim(assign, o);
  assign->add_option("--delta", o.assign.delta, "Shift exponent")->capture_default_str();
  assign->add_option("--epsilon", o.assign.epsilon, "Floor load for unused routes")->capture_default_str();
  assign->add_option("--damping", o.assign.damping, "Factor on swapped extremes")->capture_default_str();
  assign->add_option("--stop-spread", o.assign.stop_spread, "Stop when t_max - t_min is this small, s")
      ->capture_default_str();
  assign->add_option("--max-iters", o.assign.max_iters, "Iteration cap")->capture_default_str();
  assign->add_option("--replicates", o.assign.replicates, "Simulations per iteration")->capture_default_str();
  assign->add_flag("--literal-shift", o.literal_shift, "Do not divide the shift by the route count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*routes) return cmd_routes(o);
    if (*render) return cmd_render(o);
    if (*simulate) return cmd_simulate(o);
    return cmd_assign(o);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << o.scenario << ": " << e.what() << "\n";
    return kInputError;
  } catch (const RouteError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}
