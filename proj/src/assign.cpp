#include "pedroute/assign.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pedroute {

void check_params(const AssignParams& a, std::size_t n_routes) {
  if (!(a.delta > 0.0)) throw AssignError("delta must be positive");
  if (!(a.epsilon > 0.0) || !(a.epsilon * static_cast<double>(n_routes) < 1.0))
    throw AssignError("epsilon must lie in (0, 1/route_count)");
  if (!(a.damping > 0.0 && a.damping < 1.0)) throw AssignError("damping must lie in (0, 1)");
  if (!(a.stop_spread > 0.0)) throw AssignError("stop spread must be positive");
  if (a.max_iters < 1) throw AssignError("max_iters must be at least 1");
  if (a.replicates < 1) throw AssignError("replicates must be at least 1");
}

std::vector<double> effective_probs(std::span<const double> probs, double eps) {
  std::vector<double> out(probs.begin(), probs.end());
  double need = 0.0, excess = 0.0;
  for (double p : out) {
    if (p < eps)
      need += eps - p;
    else
      excess += p - eps;
  }
  if (need == 0.0) return out;
  if (need > excess) throw AssignError("epsilon floor infeasible for this many routes");
  const double keep = (excess - need) / excess;
  for (double& p : out) p = p < eps ? eps : eps + (p - eps) * keep;
  return out;
}

Extremes select_extremes(const std::vector<RouteStats>& stats, std::span<const double> probs, double eps) {
  int imin = -1, imax = -1;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    if (!stats[i].defined) continue;
    if (imin < 0 || stats[i].mean < stats[imin].mean) imin = static_cast<int>(i);
    if (probs[i] > eps && (imax < 0 || stats[i].mean > stats[imax].mean)) imax = static_cast<int>(i);
  }
  if (imin < 0) throw AssignError("no completed trips in the measurement window");
  if (imax < 0) imax = imin;
  return {imax, imin, stats[imax].mean, stats[imin].mean};
}

double shift_amount(double t_max, double t_min, const AssignParams& a, std::size_t n_routes) {
  if (!(t_max + t_min > 0.0)) throw AssignError("travel times must not both be zero");
  double base = std::pow((t_max - t_min) / (t_max + t_min), a.delta);
  if (a.scale_by_route_count) base /= static_cast<double>(n_routes);
  return base;
}

double apply_shift(std::vector<double>& probs, int from, int to, double shift) {
  if (from == to) return 0.0;
  const double moved = std::min(shift, probs[from]);
  probs[from] -= moved;
  probs[to] += moved;
  const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (double& p : probs) p /= sum;
  return moved;
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::None:
      return "none";
    case StopReason::SingleRoute:
      return "single route";
    case StopReason::Spread:
      return "spread";
    case StopReason::MaxIterations:
      return "max iterations";
  }
  return "?";
}

StopReason check_stop(const IterationRecord& last, const AssignParams& a) {
  const auto above = std::count_if(last.probs_after.begin(), last.probs_after.end(),
                                   [&](double p) { return p > a.epsilon; });
  if (above == 1) return StopReason::SingleRoute;
  if (last.extremes.t_max - last.extremes.t_min <= a.stop_spread) return StopReason::Spread;
  if (last.iteration >= a.max_iters) return StopReason::MaxIterations;
  return StopReason::None;
}

std::vector<double> uniform_probs(std::size_t n) {
  if (n == 0) throw AssignError("no routes");
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

std::vector<double> concentrated_probs(const std::vector<bool>& preferred, double share) {
  const auto k = std::count(preferred.begin(), preferred.end(), true);
  if (k == 0) throw AssignError("no preferred route for a concentrated start");
  const double rest = 1.0 - share * static_cast<double>(preferred.size() - k);
  if (rest <= 0.0) throw AssignError("detour share too large for this many routes");
  std::vector<double> out;
  for (bool b : preferred) out.push_back(b ? rest / static_cast<double>(k) : share);
  return out;
}

SimResult pool(std::span<const SimResult> runs) {
  if (runs.empty()) return {};
  if (runs.size() == 1) return runs.front();
  const std::size_t n = runs.front().routes.size();
  SimResult out;
  double wm = 0.0, wsd = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    RouteStats st;
    st.route_id = runs.front().routes[i].route_id;
    double sum = 0.0;
    for (const auto& r : runs) {
      st.count += r.routes[i].count;
      sum += static_cast<double>(r.routes[i].count) * r.routes[i].mean;
    }
    if (st.count > 0) {
      st.defined = true;
      st.mean = sum / static_cast<double>(st.count);
      double ss = 0.0;
      for (const auto& r : runs) {
        const RouteStats& x = r.routes[i];
        if (x.count == 0) continue;
        ss += static_cast<double>(x.count - 1) * x.sd * x.sd +
              static_cast<double>(x.count) * (x.mean - st.mean) * (x.mean - st.mean);
      }
      st.sd = st.count > 1 ? std::sqrt(ss / static_cast<double>(st.count - 1)) : 0.0;
      wm += static_cast<double>(st.count) * st.mean;
      wsd += static_cast<double>(st.count) * st.sd;
      out.measured += st.count;
    }
    out.routes.push_back(st);
  }
  if (out.measured > 0) {
    out.weighted_mean = wm / static_cast<double>(out.measured);
    out.weighted_sd = wsd / static_cast<double>(out.measured);
  }
  for (const auto& r : runs) {
    out.spawned += r.spawned;
    out.arrived += r.arrived;
    out.active += r.active;
    out.anomalies += r.anomalies;
  }
  return out;
}

AssignmentHistory run_assignment(const Scenario& s, const RouteSet& rs, const Area& origin,
                                 std::span<const double> init_probs, const SimParams& sim, const AssignParams& a,
                                 IterationObserver observer) {
  const std::size_t n = rs.routes.size();
  check_params(a, n);
  check_params(sim);
  if (init_probs.size() != n) throw AssignError("one initial probability per route is required");
  const double total = std::accumulate(init_probs.begin(), init_probs.end(), 0.0);
  if (std::any_of(init_probs.begin(), init_probs.end(), [](double p) { return !(p >= 0.0); }) ||
      std::abs(total - 1.0) > 1e-9)
    throw AssignError("initial probabilities must be non-negative and sum to 1");

  AssignmentHistory h;
  for (const Route& r : rs.routes) h.route_ids.push_back(r.id);
  std::vector<double> probs(init_probs.begin(), init_probs.end());
  std::optional<Extremes> prev;

  for (int it = 1;; ++it) {
    IterationRecord rec;
    rec.iteration = it;
    rec.probs_before = probs;
    rec.probs_simulated = effective_probs(probs, a.epsilon);

    std::vector<SimResult> runs(a.replicates);
#pragma omp parallel for schedule(dynamic) if (a.replicates > 1)
    for (int k = 0; k < a.replicates; ++k) {
      SimParams p = sim;
      p.seed = sim.seed + static_cast<std::uint64_t>(k);
      runs[k] = run_simulation(s, rs, origin, rec.probs_simulated, p);
    }
    rec.stats = pool(runs);
    if (rec.stats.measured == 0)
      throw AssignError("iteration " + std::to_string(it) + ": no pedestrian arrived in the measurement window");

    rec.extremes = select_extremes(rec.stats.routes, probs, a.epsilon);
    double shift = shift_amount(rec.extremes.t_max, rec.extremes.t_min, a, n);
    if (prev && prev->index_max == rec.extremes.index_min && prev->index_min == rec.extremes.index_max) {
      shift *= a.damping;
      rec.damped = true;
    }
    rec.shift = apply_shift(probs, rec.extremes.index_max, rec.extremes.index_min, shift);
    rec.probs_after = probs;
    prev = rec.extremes;

    const StopReason why = check_stop(rec, a);
    h.iterations.push_back(std::move(rec));
    if (observer) observer(h.iterations.back());
    if (why != StopReason::None) {
      h.reason = why;
      return h;
    }
  }
}

}  // namespace pedroute
