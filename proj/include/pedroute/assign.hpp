#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pedroute/sim.hpp"

namespace pedroute {

class AssignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AssignParams {
  double delta = 1.0;
  double epsilon = 0.005;
  double damping = 0.5;
  double stop_spread = 0.5;  // s
  int max_iters = 50;
  bool scale_by_route_count = true;
  int replicates = 1;
};

void check_params(const AssignParams& a, std::size_t n_routes);

/// Raises every entry below eps to eps and takes the difference from the
/// entries above eps in proportion to their excess over eps.
std::vector<double> effective_probs(std::span<const double> probs, double eps);

struct Extremes {
  int index_max = 0;  // positions in the route list
  int index_min = 0;
  double t_max = 0.0;
  double t_min = 0.0;
};

/// The minimum runs over every route with completions; the maximum only over
/// routes whose assigned probability exceeds eps. Ties go to the lower index.
Extremes select_extremes(const std::vector<RouteStats>& stats, std::span<const double> probs, double eps);

double shift_amount(double t_max, double t_min, const AssignParams& a, std::size_t n_routes);

/// Moves `shift` from probs[from] to probs[to]; the donor never goes below 0.
/// Returns the amount actually moved.
double apply_shift(std::vector<double>& probs, int from, int to, double shift);

enum class StopReason { None, SingleRoute, Spread, MaxIterations };
const char* to_string(StopReason r);

struct IterationRecord {
  int iteration = 1;
  std::vector<double> probs_before;
  std::vector<double> probs_simulated;
  std::vector<double> probs_after;
  SimResult stats;
  Extremes extremes;
  double shift = 0.0;
  bool damped = false;
};

StopReason check_stop(const IterationRecord& last, const AssignParams& a);

struct AssignmentHistory {
  std::vector<int> route_ids;
  std::vector<IterationRecord> iterations;
  StopReason reason = StopReason::None;

  const std::vector<double>& final_probs() const { return iterations.back().probs_after; }
};

/// Combines replicate results into one set of per-route statistics.
SimResult pool(std::span<const SimResult> runs);

std::vector<double> uniform_probs(std::size_t n);
/// `share` on every route not flagged in `preferred`, the rest split evenly
/// over the preferred routes.
std::vector<double> concentrated_probs(const std::vector<bool>& preferred, double share = 0.01);

using IterationObserver = std::function<void(const IterationRecord&)>;

/// Every iteration reuses the same replicate seeds (sim.seed + replicate), so
/// differences between iterations come from the probabilities alone.
AssignmentHistory run_assignment(const Scenario& s, const RouteSet& rs, const Area& origin,
                                 std::span<const double> init_probs, const SimParams& sim, const AssignParams& a,
                                 IterationObserver observer = {});

}  // namespace pedroute
