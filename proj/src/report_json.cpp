#include "pwlcycle/report_json.hpp"

#include <cmath>

namespace pwlcycle {

using nlohmann::json;

json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const SewingVerdict& v) {
  return {{"status", to_string(v.status)}, {"detail", v.detail}};
}

json to_json(const CanonicalParams& p) {
  return {{"t_l", json_number(p.T_L)}, {"t_r", json_number(p.T_R)},
          {"d_l", json_number(p.D_L)}, {"d_r", json_number(p.D_R)},
          {"a_l", json_number(p.a_L)}, {"a_r", json_number(p.a_R)}};
}

json to_json(const HalfMapSpec& s) {
  json j;
  j["side"] = to_string(s.side);
  j["status"] = s.exists ? "defined" : "not_defined";
  if (!s.exists) {
    j["q"] = nullptr;
    j["domain"] = nullptr;
    j["image"] = nullptr;
    return j;
  }
  j["q"] = json_number(s.q);
  // Open ends are null.
  j["domain"] = {json_number(s.domain.lo), json_number(s.domain.hi)};
  j["image"] = {json_number(s.image_lo), json_number(s.image_hi)};
  return j;
}

json to_json(const CycleInvariants& inv) {
  json gamma;
  gamma["center"] = inv.gamma_center
                        ? json{json_number(inv.gamma_center->first),
                               json_number(inv.gamma_center->second)}
                        : json(nullptr);
  gamma["asymptote"] = inv.gamma_asymptote ? json_number(*inv.gamma_asymptote) : json(nullptr);
  gamma["bisector_point"] =
      inv.gamma_bisector_point ? json_number(*inv.gamma_bisector_point) : json(nullptr);
  return {{"c0", json_number(inv.c0)},
          {"c1", json_number(inv.c1)},
          {"c2", json_number(inv.c2)},
          {"xi", json_number(inv.xi)},
          {"c_inf", json_number(inv.c_inf)},
          {"mu", json_number(inv.mu)},
          {"gamma", gamma},
          {"identity_residuals",
           {json_number(inv.identity_residual_1), json_number(inv.identity_residual_2)}}};
}

json to_json(const LimitCycleReport& c) {
  return {{"y0_star", json_number(c.y0_star)},
          {"y1_star", json_number(c.y1_star)},
          {"delta_prime", json_number(c.delta_prime)},
          {"stability", to_string(c.stability)},
          {"period", json_number(c.period)},
          {"oracle_residual", json_number(c.oracle_residual)}};
}

json to_json(const AnalysisReport& r) {
  json j;
  j["sewing"] = to_json(r.sewing);
  j["params"] = to_json(r.params);
  j["half_maps"] = {{"left", to_json(r.left)}, {"right", to_json(r.right)}};
  j["invariants"] = to_json(r.inv);
  j["necessary"] = {{"a_nonzero", r.necessary[0]},
                    {"trace_product_negative", r.necessary[1]},
                    {"c_nondegenerate", r.necessary[2]}};
  j["sufficient"] = r.sufficient;
  j["origin"] = to_string(r.origin);
  j["infinity"] = {{"class", to_string(r.infinity.cls)},
                   {"c_inf_discrepancy", r.infinity.c_inf_discrepancy}};
  json zeros = json::array();
  for (double z : r.search.zeros) {
    zeros.push_back(json_number(z));
  }
  j["search"] = {{"status", to_string(r.search.status)},
                 {"zeros", zeros},
                 {"scan", {json_number(r.search.scan_lo), json_number(r.search.scan_hi)}},
                 {"evaluations", r.search.evaluations},
                 {"note", r.search.note}};
  j["cycle"] = r.search.cycle ? to_json(*r.search.cycle) : json(nullptr);
  return j;
}

} // namespace pwlcycle
