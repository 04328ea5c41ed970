#include "pwlcycle/config.hpp"

#include "pwlcycle/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace pwlcycle {

using nlohmann::json;

namespace {

double number(const json& j, const std::string& where) {
  if (!j.is_number()) {
    throw ConfigError(where + ": expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    throw ConfigError(where + ": not finite");
  }
  return v;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
    }
  }
}

const json& member(const json& obj, const std::string& key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError(where + ": missing \"" + key + "\"");
  }
  return *it;
}

Mat2 matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError(where + ": expected [[a11, a12], [a21, a22]]");
  }
  Mat2 m{};
  for (std::size_t r = 0; r < 2; ++r) {
    if (!j[r].is_array() || j[r].size() != 2) {
      throw ConfigError(where + ": expected [[a11, a12], [a21, a22]]");
    }
    for (std::size_t c = 0; c < 2; ++c) {
      m[r][c] = number(j[r][c], where);
    }
  }
  return m;
}

Vec2 vector2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError(where + ": expected [b1, b2]");
  }
  return {number(j[0], where), number(j[1], where)};
}

RawSystem parse_raw(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("raw: expected an object");
  }
  reject_unknown(j, {"A_L", "b_L", "A_R", "b_R"}, "raw");
  RawSystem r;
  r.A_L = matrix(member(j, "A_L", "raw"), "raw.A_L");
  r.b_L = vector2(member(j, "b_L", "raw"), "raw.b_L");
  r.A_R = matrix(member(j, "A_R", "raw"), "raw.A_R");
  r.b_R = vector2(member(j, "b_R", "raw"), "raw.b_R");
  return r;
}

CanonicalParams parse_canonical(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("canonical: expected an object");
  }
  reject_unknown(j, {"t_l", "t_r", "d_l", "d_r", "a_l", "a_r"}, "canonical");
  CanonicalParams p;
  p.T_L = number(member(j, "t_l", "canonical"), "canonical.t_l");
  p.T_R = number(member(j, "t_r", "canonical"), "canonical.t_r");
  p.D_L = number(member(j, "d_l", "canonical"), "canonical.d_l");
  p.D_R = number(member(j, "d_r", "canonical"), "canonical.d_r");
  p.a_L = number(member(j, "a_l", "canonical"), "canonical.a_l");
  p.a_R = number(member(j, "a_r", "canonical"), "canonical.a_r");
  return p;
}

void parse_tolerances(const json& j, Tolerances& tol) {
  if (!j.is_object()) {
    throw ConfigError("tolerances: expected an object");
  }
  for (const auto& item : j.items()) {
    const std::string& k = item.key();
    const std::string where = "tolerances." + k;
    if (k == "scan_points") {
      const double v = number(item.value(), where);
      if (v < 8 || v != std::floor(v)) {
        throw ConfigError(where + ": expected an integer >= 8");
      }
      tol.scan_points = static_cast<std::size_t>(v);
      continue;
    }
    double* slot = nullptr;
    if (k == "sewing_rel") slot = &tol.sewing_rel;
    else if (k == "root_rel") slot = &tol.root_rel;
    else if (k == "discriminant_rel") slot = &tol.discriminant_rel;
    else if (k == "cycle_residual") slot = &tol.cycle_residual;
    else if (k == "simple_zero") slot = &tol.simple_zero;
    else if (k == "scan_cap") slot = &tol.scan_cap;
    else if (k == "scan_cap_max") slot = &tol.scan_cap_max;
    else if (k == "oracle_time_cap") slot = &tol.oracle_time_cap;
    else if (k == "spectrum_rel") slot = &tol.spectrum_rel;
    else if (k == "quadrature_abs") slot = &tol.quadrature_abs;
    if (!slot) {
      throw ConfigError("tolerances: unknown key \"" + k + "\"");
    }
    const double v = number(item.value(), where);
    if (v < 0.0) {
      throw ConfigError(where + ": must be non-negative");
    }
    *slot = v;
  }
}

SweepConfig parse_sweep(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("sweep: expected an object");
  }
  reject_unknown(j, {"count", "seed", "ranges", "threads"}, "sweep");
  SweepConfig s;
  auto count = [&](const char* key) -> std::size_t {
    const double v = number(member(j, key, "sweep"), std::string("sweep.") + key);
    if (v < 0 || v != std::floor(v)) {
      throw ConfigError(std::string("sweep.") + key + ": expected a non-negative integer");
    }
    return static_cast<std::size_t>(v);
  };
  s.count = count("count");
  const json& seed = member(j, "seed", "sweep");
  if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() &&
                                    seed.get<std::int64_t>() < 0)) {
    throw ConfigError("sweep.seed: expected a non-negative integer");
  }
  s.seed = seed.get<std::uint64_t>();
  if (j.contains("threads")) {
    s.threads = count("threads");
  }
  if (j.contains("ranges")) {
    const json& r = j["ranges"];
    if (!r.is_object()) {
      throw ConfigError("sweep.ranges: expected an object");
    }
    std::set<std::string> allowed(SweepRanges::names().begin(), SweepRanges::names().end());
    reject_unknown(r, allowed, "sweep.ranges");
    for (std::size_t i = 0; i < 6; ++i) {
      const char* name = SweepRanges::names()[i];
      if (!r.contains(name)) {
        continue;
      }
      const std::string where = std::string("sweep.ranges.") + name;
      const json& box = r[name];
      if (!box.is_array() || box.size() != 2) {
        throw ConfigError(where + ": expected [lo, hi]");
      }
      const double lo = number(box[0], where);
      const double hi = number(box[1], where);
      if (lo > hi) {
        throw ConfigError(where + ": lo > hi");
      }
      s.ranges.box[i] = {lo, hi};
    }
  }
  return s;
}

double parse_double(const std::string& text, const std::string& what) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError(what + ": cannot parse \"" + text + "\" as a number");
  }
  return v;
}

} // namespace

const std::array<const char*, 6>& SweepRanges::names() {
  static const std::array<const char*, 6> n{"t_l", "t_r", "d_l", "d_r", "a_l", "a_r"};
  return n;
}

SewingVerdict Config::sewing() const {
  if (raw) {
    return check_sewing(*raw, tol.sewing_rel);
  }
  if (canonical) {
    return check_sewing(canonical->as_raw(), tol.sewing_rel);
  }
  throw ConfigError("config has neither \"raw\" nor \"canonical\"");
}

CanonicalParams Config::params() const {
  if (raw) {
    return reduce_to_lienard(*raw, tol.sewing_rel);
  }
  if (canonical) {
    return *canonical;
  }
  throw ConfigError("config has neither \"raw\" nor \"canonical\"");
}

Config parse_config(const json& doc) {
  if (!doc.is_object()) {
    throw ConfigError("config: expected a JSON object");
  }
  reject_unknown(doc, {"raw", "canonical", "tolerances", "sweep", "name", "description"},
                 "config");
  Config c;
  if (doc.contains("raw") && doc.contains("canonical")) {
    throw ConfigError("config: \"raw\" and \"canonical\" are mutually exclusive");
  }
  if (doc.contains("raw")) {
    c.raw = parse_raw(doc["raw"]);
  }
  if (doc.contains("canonical")) {
    c.canonical = parse_canonical(doc["canonical"]);
  }
  if (doc.contains("tolerances")) {
    parse_tolerances(doc["tolerances"], c.tol);
  }
  if (doc.contains("sweep")) {
    c.sweep = parse_sweep(doc["sweep"]);
  }
  if (!c.has_system() && !c.sweep) {
    throw ConfigError("config: one of \"raw\" or \"canonical\" is required");
  }
  return c;
}

Config parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(doc);
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config \"" + path + "\"");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_tolerance_env(Tolerances& tol, const char* value) {
  if (value == nullptr || *value == '\0') {
    return;
  }
  const double v = parse_double(value, "PWLCYCLE_TOL");
  if (!(v > 0.0)) {
    throw ConfigError("PWLCYCLE_TOL: must be positive");
  }
  tol.sewing_rel = v;
}

double Grid::at(std::size_t k) const {
  if (n <= 1) {
    return lo;
  }
  if (k + 1 == n) {
    return hi;
  }
  return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
}

Grid parse_grid(const std::string& text) {
  const auto first = text.find(':');
  const auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
  if (second == std::string::npos || text.find(':', second + 1) != std::string::npos) {
    throw ConfigError("--grid: expected lo:hi:n, got \"" + text + "\"");
  }
  Grid g;
  g.lo = parse_double(text.substr(0, first), "--grid lo");
  g.hi = parse_double(text.substr(first + 1, second - first - 1), "--grid hi");
  const double n = parse_double(text.substr(second + 1), "--grid n");
  if (n < 0 || n != std::floor(n) || n > 1e8) {
    throw ConfigError("--grid: n must be a non-negative integer");
  }
  g.n = static_cast<std::size_t>(n);
  return g;
}

std::pair<double, double> parse_pair(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos) {
    throw ConfigError("expected x,y, got \"" + text + "\"");
  }
  return {parse_double(text.substr(0, comma), "x"), parse_double(text.substr(comma + 1), "y")};
}

CanonicalParams draw_sample(const SweepRanges& ranges, std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(index) >> 32)};
  std::mt19937_64 rng(seq);
  double v[6];
  for (std::size_t i = 0; i < 6; ++i) {
    // 53 random bits mapped to [0, 1), identical on every platform.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto [lo, hi] = ranges.box[i];
    v[i] = lo + (hi - lo) * u;
  }
  CanonicalParams p;
  p.T_L = v[0];
  p.T_R = v[1];
  p.D_L = v[2];
  p.D_R = v[3];
  p.a_L = v[4];
  p.a_R = v[5];
  return p;
}

} // namespace pwlcycle
