#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pedroute/routes.hpp"

namespace pedroute {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class StepKernel { Parallel, Reference };

struct SimParams {
  double dt = 0.1;              // s
  double v0_mean = 1.34;        // m/s
  double v0_sd = 0.26;          // m/s
  double rho_max = 5.4;         // persons / m^2
  double density_radius = 1.0;  // m
  double demand = 5000.0;       // persons / hour
  double duration = 900.0;      // s
  double measure_start = 300.0;
  double measure_end = 900.0;
  std::uint64_t seed = 42;
  StepKernel kernel = StepKernel::Parallel;
};

/// Throws SimError on inconsistent parameters.
void check_params(const SimParams& p);

struct Spawn {
  double time = 0.0;
  Cell origin_cell;
  int route_index = 0;  // position in the route list, not the route id
  double free_speed = 0.0;
};

/// Poisson arrivals over [0, duration]; the schedule depends only on the
/// arguments and p.seed.
std::vector<Spawn> spawn_schedule(const SimParams& p, std::span<const Cell> origin_cells, std::span<const double> probs);

/// Free speed draw: normal(mean, sd) truncated to [0.5 mean, 1.5 mean].
double draw_free_speed(std::mt19937_64& rng, double mean, double sd);

struct Agent {
  int id = 0;
  Vec2 position;
  int route_index = 0;
  int leg_index = 0;
  double free_speed = 0.0;
  double spawn_time = 0.0;
  std::optional<double> arrival_time;
  bool active = true;
};

struct RouteStats {
  int route_id = 0;
  std::size_t count = 0;
  /// Undefined (false) when no agent of the route arrived in the window.
  bool defined = false;
  double mean = 0.0;  // s
  double sd = 0.0;    // s
};

struct SimResult {
  std::vector<RouteStats> routes;
  /// Count-weighted mean and count-weighted mean of the per-route standard
  /// deviations, over routes with completions.
  double weighted_mean = 0.0;
  double weighted_sd = 0.0;
  std::size_t measured = 0;
  std::size_t spawned = 0;
  std::size_t arrived = 0;
  std::size_t active = 0;
  /// Agents removed because their current leg could not be reached.
  std::size_t anomalies = 0;
};

/// Neighbor counts within `radius` (excluding self) for every position.
/// The hashed variant buckets positions on a grid of pitch `radius`.
std::vector<int> neighbor_counts_bruteforce(std::span<const Vec2> pos, double radius);
std::vector<int> neighbor_counts_hashed(std::span<const Vec2> pos, double radius);

/// One row per agent per recorded step.
struct TrajectoryRow {
  double time;
  int agent_id;
  Vec2 position;
  int route_id;
  int leg_index;
};
using TrajectorySink = std::function<void(const TrajectoryRow&)>;

class Simulation {
 public:
  /// `rs` routes are simulated in list order; probs[i] belongs to rs.routes[i].
  Simulation(const Scenario& s, const RouteSet& rs, const Area& origin, std::span<const double> probs, SimParams p);

  /// Spawns due agents, then moves all active agents by one time step.
  void step();
  bool finished() const { return time_ >= p_.duration - 1e-9; }
  double time() const { return time_; }
  const std::vector<Agent>& agents() const { return agents_; }
  std::size_t pending_spawns() const { return schedule_.size() - next_spawn_; }
  std::size_t anomalies() const { return anomalies_; }
  SimResult result() const;

  void set_trajectory_sink(TrajectorySink sink, int every_n_steps = 10);

 private:
  struct Leg {
    const DistanceField* field;
    const CellMask* area;
  };
  struct Outcome {
    Vec2 position;
    int leg_index;
    bool arrived;
    bool anomaly;
  };

  void spawn_due();
  Outcome advance(const Agent& a, int neighbors) const;
  bool can_stand(const DistanceField& f, Vec2 from, Vec2 to) const;

  const Scenario& s_;
  SimParams p_;
  std::vector<int> route_ids_;
  std::vector<std::vector<Leg>> legs_;  // per route, legs plus the destination
  std::map<std::string, CellMask> area_masks_;
  std::vector<Spawn> schedule_;
  std::size_t next_spawn_ = 0;
  std::vector<Agent> agents_;
  double time_ = 0.0;
  long step_count_ = 0;
  std::size_t anomalies_ = 0;
  TrajectorySink sink_;
  int sink_every_ = 10;
};

SimResult run_simulation(const Scenario& s, const RouteSet& rs, const Area& origin, std::span<const double> probs,
                         const SimParams& p, TrajectorySink sink = {}, int sink_every_n_steps = 10);

/// Mean and standard deviation per route plus the weighted totals, from
/// (route index, travel time) samples.
SimResult summarize(std::span<const int> route_ids, std::span<const std::pair<int, double>> samples);

}  // namespace pedroute
