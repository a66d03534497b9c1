#include "pedroute/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace pedroute {

void check_params(const SimParams& p) {
  if (!(p.dt > 0.0)) throw SimError("dt must be positive");
  if (!(p.rho_max > 0.0)) throw SimError("rho_max must be positive");
  if (!(p.density_radius > 0.0)) throw SimError("density radius must be positive");
  if (!(p.v0_mean > 0.0) || p.v0_sd < 0.0) throw SimError("invalid free-speed distribution");
  if (p.demand < 0.0) throw SimError("demand must be non-negative");
  if (!(p.measure_start < p.measure_end) || p.measure_end > p.duration)
    throw SimError("measurement window must satisfy start < end <= duration");
}

double draw_free_speed(std::mt19937_64& rng, double mean, double sd) {
  if (sd == 0.0) return mean;
  std::normal_distribution<double> n(mean, sd);
  for (;;) {
    const double v = n(rng);
    if (v >= 0.5 * mean && v <= 1.5 * mean) return v;
  }
}

std::vector<Spawn> spawn_schedule(const SimParams& p, std::span<const Cell> origin_cells, std::span<const double> probs) {
  if (probs.empty()) throw SimError("no route probabilities");
  double sum = 0.0;
  for (double q : probs) {
    if (!(q >= 0.0)) throw SimError("route probabilities must be non-negative");
    sum += q;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw SimError("route probabilities must sum to 1");
  if (origin_cells.empty()) throw SimError("origin has no cells");

  std::vector<Spawn> out;
  if (p.demand <= 0.0) return out;
  std::mt19937_64 rng(p.seed);
  std::exponential_distribution<double> gap(p.demand / 3600.0);
  std::uniform_int_distribution<std::size_t> pick_cell(0, origin_cells.size() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double t = gap(rng);
  while (t <= p.duration) {
    Spawn sp;
    sp.time = t;
    sp.origin_cell = origin_cells[pick_cell(rng)];
    const double r = u(rng) * sum;
    double acc = 0.0;
    sp.route_index = static_cast<int>(probs.size()) - 1;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (r < acc && probs[i] > 0.0) {
        sp.route_index = static_cast<int>(i);
        break;
      }
    }
    while (probs[sp.route_index] == 0.0) --sp.route_index;
    sp.free_speed = draw_free_speed(rng, p.v0_mean, p.v0_sd);
    out.push_back(sp);
    t += gap(rng);
  }
  return out;
}

std::vector<int> neighbor_counts_bruteforce(std::span<const Vec2> pos, double radius) {
  const double r2 = radius * radius;
  std::vector<int> out(pos.size(), 0);
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t j = 0; j < pos.size(); ++j) {
      if (i == j) continue;
      const double dx = pos[j].x - pos[i].x, dy = pos[j].y - pos[i].y;
      if (dx * dx + dy * dy <= r2) ++out[i];
    }
  return out;
}

std::vector<int> neighbor_counts_hashed(std::span<const Vec2> pos, double radius) {
  std::vector<int> out(pos.size(), 0);
  if (pos.empty()) return out;
  double minx = pos[0].x, miny = pos[0].y, maxx = minx, maxy = miny;
  for (Vec2 p : pos) {
    minx = std::min(minx, p.x);
    miny = std::min(miny, p.y);
    maxx = std::max(maxx, p.x);
    maxy = std::max(maxy, p.y);
  }
  const int nx = static_cast<int>((maxx - minx) / radius) + 1;
  const int ny = static_cast<int>((maxy - miny) / radius) + 1;
  auto bucket_of = [&](Vec2 p) {
    const int bx = std::min(nx - 1, static_cast<int>((p.x - minx) / radius));
    const int by = std::min(ny - 1, static_cast<int>((p.y - miny) / radius));
    return std::pair{bx, by};
  };

  // Counting sort into buckets.
  std::vector<int> start(static_cast<std::size_t>(nx) * ny + 1, 0);
  std::vector<int> bucket(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const auto [bx, by] = bucket_of(pos[i]);
    bucket[i] = by * nx + bx;
    ++start[bucket[i] + 1];
  }
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<int> members(pos.size());
  std::vector<int> fill(start.begin(), start.end() - 1);
  for (std::size_t i = 0; i < pos.size(); ++i) members[fill[bucket[i]]++] = static_cast<int>(i);

  const double r2 = radius * radius;
  const long n = static_cast<long>(pos.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const int bx = bucket[i] % nx, by = bucket[i] / nx;
    int c = 0;
    for (int y = std::max(0, by - 1); y <= std::min(ny - 1, by + 1); ++y)
      for (int x = std::max(0, bx - 1); x <= std::min(nx - 1, bx + 1); ++x) {
        const int b = y * nx + x;
        for (int k = start[b]; k < start[b + 1]; ++k) {
          const int j = members[k];
          if (j == i) continue;
          const double dx = pos[j].x - pos[i].x, dy = pos[j].y - pos[i].y;
          if (dx * dx + dy * dy <= r2) ++c;
        }
      }
    out[i] = c;
  }
  return out;
}

Simulation::Simulation(const Scenario& s, const RouteSet& rs, const Area& origin, std::span<const double> probs,
                       SimParams p)
    : s_(s), p_(p) {
  check_params(p_);
  if (probs.size() != rs.routes.size()) throw SimError("one probability per route is required");
  const Area& dest = s.area(rs.destination);
  area_masks_.emplace(dest.id, CellMask::from_cells(s.width(), s.height(), dest.cells));
  for (const auto& a : rs.areas) area_masks_.emplace(a.id, CellMask::from_cells(s.width(), s.height(), a.cells));
  for (const Route& r : rs.routes) {
    route_ids_.push_back(r.id);
    std::vector<Leg> legs;
    for (std::size_t i = 0; i <= r.legs.size(); ++i) {
      const std::string& target = rs.leg_target(r, i);
      legs.push_back({&rs.field(target), &area_masks_.at(target)});
    }
    legs_.push_back(std::move(legs));
  }
  schedule_ = spawn_schedule(p_, origin.cells, probs);
}

void Simulation::set_trajectory_sink(TrajectorySink sink, int every_n_steps) {
  sink_ = std::move(sink);
  sink_every_ = std::max(1, every_n_steps);
}

void Simulation::spawn_due() {
  while (next_spawn_ < schedule_.size() && schedule_[next_spawn_].time <= time_ + 1e-12) {
    const Spawn& sp = schedule_[next_spawn_];
    Agent a;
    a.id = static_cast<int>(next_spawn_);
    a.position = cell_center(sp.origin_cell, s_.cell_size());
    a.route_index = sp.route_index;
    a.free_speed = sp.free_speed;
    a.spawn_time = sp.time;
    agents_.push_back(a);
    ++next_spawn_;
  }
}

bool Simulation::can_stand(const DistanceField& f, Vec2 from, Vec2 to) const {
  const double cs = s_.cell_size();
  const Cell c = cell_of(to, cs);
  if (!s_.walkable(c) || !f.reachable(c)) return false;
  const Cell m = cell_of((from + to) * 0.5, cs);
  return s_.walkable(m) && f.reachable(m);
}

Simulation::Outcome Simulation::advance(const Agent& a, int neighbors) const {
  const double cs = s_.cell_size();
  Outcome out{a.position, a.leg_index, false, false};
  const auto& legs = legs_[a.route_index];
  const Cell here = cell_of(a.position, cs);
  if (legs[out.leg_index].area->test(here)) {
    if (out.leg_index + 1 == static_cast<int>(legs.size())) {
      out.arrived = true;
      return out;
    }
    ++out.leg_index;
  }
  const DistanceField& f = *legs[out.leg_index].field;
  if (!f.reachable(here)) {
    out.anomaly = true;
    return out;
  }
  const double rho = neighbors / (std::numbers::pi * p_.density_radius * p_.density_radius);
  const double v = a.free_speed * std::max(0.0, 1.0 - rho / p_.rho_max);
  const Vec2 dir = gradient_at(f, here);
  if (v <= 0.0 || dir.is_zero()) return out;
  const Vec2 step = dir * (v * p_.dt);
  for (double ang : detour_angles()) {
    const Vec2 to = a.position + step.rotated(ang);
    if (can_stand(f, a.position, to)) {
      out.position = to;
      break;
    }
  }
  return out;
}

void Simulation::step() {
  spawn_due();
  std::vector<int> active;
  for (std::size_t i = 0; i < agents_.size(); ++i)
    if (agents_[i].active) active.push_back(static_cast<int>(i));

  if (sink_ && step_count_ % sink_every_ == 0)
    for (int i : active) {
      const Agent& a = agents_[i];
      sink_({time_, a.id, a.position, route_ids_[a.route_index], a.leg_index});
    }

  std::vector<Vec2> pos(active.size());
  for (std::size_t k = 0; k < active.size(); ++k) pos[k] = agents_[active[k]].position;
  const std::vector<int> counts = p_.kernel == StepKernel::Parallel ? neighbor_counts_hashed(pos, p_.density_radius)
                                                                   : neighbor_counts_bruteforce(pos, p_.density_radius);

  std::vector<Outcome> outcomes(active.size());
  const long n = static_cast<long>(active.size());
  if (p_.kernel == StepKernel::Parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (long k = 0; k < n; ++k) outcomes[k] = advance(agents_[active[k]], counts[k]);
  } else {
    for (long k = 0; k < n; ++k) outcomes[k] = advance(agents_[active[k]], counts[k]);
  }

  for (std::size_t k = 0; k < active.size(); ++k) {
    Agent& a = agents_[active[k]];
    const Outcome& o = outcomes[k];
    a.position = o.position;
    a.leg_index = o.leg_index;
    if (o.arrived) {
      a.arrival_time = time_;
      a.active = false;
    } else if (o.anomaly) {
      a.active = false;
      ++anomalies_;
    }
  }
  ++step_count_;
  time_ = step_count_ * p_.dt;
}

SimResult summarize(std::span<const int> route_ids, std::span<const std::pair<int, double>> samples) {
  SimResult r;
  const std::size_t n = route_ids.size();
  std::vector<double> sum(n, 0.0);
  std::vector<std::size_t> cnt(n, 0);
  for (const auto& [i, t] : samples) {
    sum[i] += t;
    ++cnt[i];
  }
  std::vector<double> ss(n, 0.0);
  for (const auto& [i, t] : samples) {
    const double m = sum[i] / static_cast<double>(cnt[i]);
    ss[i] += (t - m) * (t - m);
  }
  double wm = 0.0, wsd = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    RouteStats st;
    st.route_id = route_ids[i];
    st.count = cnt[i];
    if (cnt[i] > 0) {
      st.defined = true;
      st.mean = sum[i] / static_cast<double>(cnt[i]);
      st.sd = cnt[i] > 1 ? std::sqrt(ss[i] / static_cast<double>(cnt[i] - 1)) : 0.0;
      wm += static_cast<double>(cnt[i]) * st.mean;
      wsd += static_cast<double>(cnt[i]) * st.sd;
      r.measured += cnt[i];
    }
    r.routes.push_back(st);
  }
  if (r.measured > 0) {
    r.weighted_mean = wm / static_cast<double>(r.measured);
    r.weighted_sd = wsd / static_cast<double>(r.measured);
  }
  return r;
}

SimResult Simulation::result() const {
  std::vector<std::pair<int, double>> samples;
  std::size_t arrived = 0, active = 0;
  for (const Agent& a : agents_) {
    if (a.arrival_time) {
      ++arrived;
      if (*a.arrival_time >= p_.measure_start && *a.arrival_time <= p_.measure_end)
        samples.emplace_back(a.route_index, *a.arrival_time - a.spawn_time);
    } else if (a.active) {
      ++active;
    }
  }
  SimResult r = summarize(route_ids_, samples);
  r.spawned = agents_.size();
  r.arrived = arrived;
  r.active = active;
  r.anomalies = anomalies_;
  return r;
}

SimResult run_simulation(const Scenario& s, const RouteSet& rs, const Area& origin, std::span<const double> probs,
                         const SimParams& p, TrajectorySink sink, int sink_every_n_steps) {
  Simulation sim(s, rs, origin, probs, p);
  if (sink) sim.set_trajectory_sink(std::move(sink), sink_every_n_steps);
  while (!sim.finished()) sim.step();
  return sim.result();
}

}  // namespace pedroute
