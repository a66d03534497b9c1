#include "pedroute/report.hpp"

#include <fstream>
#include <sstream>

namespace pedroute {

using nlohmann::json;

json routes_json(const Scenario& s, const RouteSet& rs, const std::vector<bool>& aligned) {
  json j;
  j["destination"] = rs.destination;
  j["band_width_m"] = rs.config.band_width;
  j["max_depth"] = rs.config.max_depth;
  j["routes"] = json::array();
  for (std::size_t i = 0; i < rs.routes.size(); ++i) {
    const Route& r = rs.routes[i];
    j["routes"].push_back({{"id", r.id}, {"legs", r.legs}, {"shortest_path", i < aligned.size() && aligned[i]}});
  }
  j["areas"] = json::array();
  for (const auto& a : rs.areas) {
    const Vec2 at = area_anchor(Area{a.id, '?', AreaRole::Origin, a.cells}, s.cell_size());
    j["areas"].push_back({{"id", a.id},
                          {"parent", a.parent_target},
                          {"band_index", a.band_index},
                          {"front_distance_m", a.front_distance},
                          {"depth", a.depth},
                          {"cells", a.cells.size()},
                          {"anchor_m", {at.x, at.y}}});
  }
  return j;
}

std::string history_csv(const AssignmentHistory& h) {
  std::ostringstream o;
  o.precision(10);
  o << "iteration,route_id,prob_before,prob_after,mean_tt_s,count,t_max_s,t_min_s,shift,damped,stop_reason\n";
  for (std::size_t k = 0; k < h.iterations.size(); ++k) {
    const IterationRecord& it = h.iterations[k];
    const bool last = k + 1 == h.iterations.size();
    for (std::size_t i = 0; i < h.route_ids.size(); ++i) {
      const RouteStats& st = it.stats.routes[i];
      o << it.iteration << ',' << h.route_ids[i] << ',' << it.probs_before[i] << ',' << it.probs_after[i] << ',';
      if (st.defined) o << st.mean;
      o << ',' << st.count << ',' << it.extremes.t_max << ',' << it.extremes.t_min << ',' << it.shift << ','
        << (it.damped ? 1 : 0) << ',';
      if (last && i + 1 == h.route_ids.size()) o << to_string(h.reason);
      o << '\n';
    }
  }
  return o.str();
}

json sim_result_json(const SimResult& r) {
  json j;
  j["weighted_mean_s"] = r.weighted_mean;
  j["weighted_sd_s"] = r.weighted_sd;
  j["measured"] = r.measured;
  j["spawned"] = r.spawned;
  j["arrived"] = r.arrived;
  j["active_at_end"] = r.active;
  j["anomalies"] = r.anomalies;
  j["routes"] = json::array();
  for (const auto& st : r.routes) {
    json e{{"id", st.route_id}, {"count", st.count}};
    e["mean_s"] = st.defined ? json(st.mean) : json(nullptr);
    e["sd_s"] = st.defined ? json(st.sd) : json(nullptr);
    j["routes"].push_back(e);
  }
  return j;
}

json summary_json(const AssignmentHistory& h) {
  json j;
  j["iterations"] = h.iterations.size();
  j["stop_reason"] = to_string(h.reason);
  j["route_ids"] = h.route_ids;
  j["final_probs"] = h.final_probs();
  const IterationRecord& last = h.iterations.back();
  j["final"] = sim_result_json(last.stats);
  j["weighted_mean_s"] = last.stats.weighted_mean;
  j["weighted_sd_s"] = last.stats.weighted_sd;
  json wm = json::array(), wsd = json::array();
  for (const auto& it : h.iterations) {
    wm.push_back(it.stats.weighted_mean);
    wsd.push_back(it.stats.weighted_sd);
  }
  j["weighted_mean_by_iteration_s"] = wm;
  j["weighted_sd_by_iteration_s"] = wsd;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

}  // namespace pedroute
