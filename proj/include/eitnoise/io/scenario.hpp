#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "eitnoise/analysis.hpp"
#include "eitnoise/common.hpp"
#include "eitnoise/model.hpp"
#include "eitnoise/params.hpp"
#include "eitnoise/spectra.hpp"

namespace eitnoise::io {

using nlohmann::json;

/// Reads keys of one JSON object and rejects any key left unread.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw InputError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number()) throw InputError(where(key) + ": expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_integer()) throw InputError(where(key) + ": expected an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_string()) throw InputError(where(key) + ": expected a string");
    return v.get<std::string>();
  }

  Complex complex(const std::string& key, Complex fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return {v[0].get<double>(), v[1].get<double>()};
    throw InputError(where(key) + ": expected a number or [re, im]");
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) throw InputError(path_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(origin + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

/// 64-bit FNV-1a over the canonical (key-sorted, compact) dump.
inline std::string scenario_hash(const json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : doc.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

struct GridSpec {
  double omega_min = 1e-3;
  double omega_max = 10.0;
  int count = 2000;  // per half-axis
  GridSpacing spacing = GridSpacing::Log;

  std::vector<double> omegas() const { return symmetric_grid(omega_min, omega_max, count, spacing); }
};

struct Scenario {
  std::string name;
  SystemParams params;
  GridSpec grid;
  double theta_probe = 0.0;
  double theta_pump = 0.0;
  Channel extrema_channel = Channel::Probe;
  ExtremaOptions extrema;
  SteadyStateOptions steady_state;
  LinearizationOptions linearization;
  std::string hash;
};

inline GridSpacing parse_spacing(const std::string& s, const std::string& where) {
  if (s == "log") return GridSpacing::Log;
  if (s == "linear") return GridSpacing::Linear;
  throw InputError(where + ": spacing must be \"log\" or \"linear\"");
}

inline Channel parse_channel(const std::string& s, const std::string& where) {
  if (s == "probe") return Channel::Probe;
  if (s == "pump") return Channel::Pump;
  throw InputError(where + ": channel must be \"probe\" or \"pump\"");
}

inline SpectrumSource parse_source(const std::string& s, const std::string& where) {
  if (s == "numeric") return SpectrumSource::Numeric;
  if (s == "closed_form") return SpectrumSource::ClosedForm;
  throw InputError(where + ": source must be \"numeric\" or \"closed_form\"");
}

inline SqueezeSpec parse_squeeze(ObjectReader& parent, const std::string& key) {
  if (!parent.has(key)) return {};
  ObjectReader r(parent.at(key), parent.where(key));
  const double radius = r.number("r", 0.0);
  const double theta = r.number("theta", 0.0);
  r.finish();
  return {radius, theta};
}

inline Scenario scenario_from_json(const json& doc, const std::string& origin = "scenario") {
  ObjectReader r(doc, origin);
  Scenario sc;
  sc.name = r.string("name", "");
  if (r.has("description")) {
    if (!r.at("description").is_string()) throw InputError(r.where("description") + ": expected a string");
  }

  SystemParams& p = sc.params;
  p.gamma_rad_1 = r.number("gamma_rad_1", p.gamma_rad_1);
  p.gamma_rad_2 = r.number("gamma_rad_2", p.gamma_rad_2);
  p.gamma_cross = r.number("gamma_cross", p.gamma_cross);
  p.kappa_1 = r.number("kappa_1", p.kappa_1);
  p.kappa_2 = r.number("kappa_2", p.kappa_2);
  p.g_1 = r.number("g_1", p.g_1);
  p.g_2 = r.number("g_2", p.g_2);
  p.n_atoms = r.number("n_atoms", p.n_atoms);
  p.alpha_1 = r.complex("alpha_1", p.alpha_1);
  p.alpha_2 = r.complex("alpha_2", p.alpha_2);
  p.squeeze_1 = parse_squeeze(r, "squeeze_1");
  p.squeeze_2 = parse_squeeze(r, "squeeze_2");

  if (r.has("grid")) {
    ObjectReader g(r.at("grid"), r.where("grid"));
    sc.grid.omega_min = g.number("omega_min", sc.grid.omega_min);
    sc.grid.omega_max = g.number("omega_max", sc.grid.omega_max);
    sc.grid.count = g.integer("count", sc.grid.count);
    sc.grid.spacing = parse_spacing(g.string("spacing", "log"), g.where("spacing"));
    g.finish();
  }
  if (sc.grid.count < 2) throw InputError(origin + ".grid.count: need at least 2 points per half-axis");
  if (!(sc.grid.omega_min > 0.0) || !(sc.grid.omega_max > sc.grid.omega_min))
    throw InputError(origin + ".grid: need 0 < omega_min < omega_max");

  sc.theta_probe = r.number("theta_probe", 0.0);
  sc.theta_pump = r.number("theta_pump", 0.0);

  if (r.has("extrema")) {
    ObjectReader e(r.at("extrema"), r.where("extrema"));
    sc.extrema_channel = parse_channel(e.string("channel", "probe"), e.where("channel"));
    sc.extrema.omega_min = e.number("omega_min", sc.extrema.omega_min);
    sc.extrema.omega_max = e.number("omega_max", sc.extrema.omega_max);
    sc.extrema.points_per_side = e.integer("points_per_side", sc.extrema.points_per_side);
    sc.extrema.refine_tolerance = e.number("refine_tolerance", sc.extrema.refine_tolerance);
    sc.extrema.source = parse_source(e.string("source", "numeric"), e.where("source"));
    e.finish();
  }

  if (r.has("tolerances")) {
    ObjectReader t(r.at("tolerances"), r.where("tolerances"));
    sc.steady_state.tolerance = t.number("steady_state", sc.steady_state.tolerance);
    sc.steady_state.max_iterations = t.integer("max_iterations", sc.steady_state.max_iterations);
    sc.linearization.residual_tolerance = t.number("residual", sc.linearization.residual_tolerance);
    t.finish();
  }
  r.finish();

  const auto report = validate_params(p);
  if (!report.valid()) {
    std::string msg = origin + ": invalid parameters:";
    for (const auto& v : report.violations) msg += " " + v + ";";
    throw InputError(msg);
  }
  sc.params.squeeze_1 = SqueezeSpec::make(p.squeeze_1.r, p.squeeze_1.theta);
  sc.params.squeeze_2 = SqueezeSpec::make(p.squeeze_2.r, p.squeeze_2.theta);
  sc.hash = scenario_hash(doc);
  return sc;
}

inline Scenario load_scenario(const std::string& path) { return scenario_from_json(read_json_file(path), path); }

// ---------------------------------------------------------------------------
// Separability scan grids. Axes are explicit lists or {min, max, count[, spacing]}.

inline std::vector<double> parse_axis(ObjectReader& parent, const std::string& key, bool drop_zero = false) {
  if (!parent.has(key)) throw InputError(parent.where(key) + ": missing axis");
  const json& v = parent.at(key);
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) throw InputError(parent.where(key) + ": axis entries must be numbers");
      out.push_back(x.get<double>());
    }
  } else {
    ObjectReader a(v, parent.where(key));
    const double lo = a.number("min", 0.0), hi = a.number("max", 0.0);
    const int n = a.integer("count", 0);
    const GridSpacing spacing = parse_spacing(a.string("spacing", "linear"), a.where("spacing"));
    a.finish();
    if (n < 1) throw InputError(parent.where(key) + ".count: must be >= 1");
    if (n > 1 && !(hi > lo)) throw InputError(parent.where(key) + ": need min < max");
    if (spacing == GridSpacing::Log && !(lo > 0.0)) throw InputError(parent.where(key) + ": log axis needs min > 0");
    for (int i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      out.push_back(spacing == GridSpacing::Log ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
    }
  }
  if (drop_zero) std::erase_if(out, [](double x) { return std::abs(x) < 1e-14; });
  for (double x : out)
    if (!std::isfinite(x)) throw InputError(parent.where(key) + ": non-finite entry");
  if (out.empty()) throw InputError(parent.where(key) + ": empty axis");
  return out;
}

inline DgczGrid dgcz_grid_from_json(const json& doc, const std::string& origin = "grid") {
  ObjectReader r(doc, origin);
  DgczGrid g;
  if (r.has("name")) (void)r.string("name", "");
  if (r.has("description")) (void)r.string("description", "");
  g.cooperativities = parse_axis(r, "cooperativity");
  g.rabi_1 = parse_axis(r, "rabi_1");
  g.rabi_2 = parse_axis(r, "rabi_2");
  g.omegas = parse_axis(r, "omega", true);
  g.kappa = r.number("kappa", g.kappa);
  g.squeeze_r2 = r.number("squeeze_r2", g.squeeze_r2);
  g.n_atoms = r.number("n_atoms", g.n_atoms);
  g.theta_steps = r.integer("theta_steps", g.theta_steps);
  g.source = parse_source(r.string("source", "numeric"), r.where("source"));
  r.finish();
  if (g.theta_steps < 1) throw InputError(origin + ".theta_steps: must be >= 1");
  for (double c : g.cooperativities)
    if (!(c > 0.0)) throw InputError(origin + ".cooperativity: entries must be > 0");
  if (!(g.kappa > 0.0) || !(g.n_atoms >= 1.0) || !(g.squeeze_r2 >= 0.0))
    throw InputError(origin + ": kappa > 0, n_atoms >= 1 and squeeze_r2 >= 0 required");
  return g;
}

inline DgczGrid load_dgcz_grid(const std::string& path) { return dgcz_grid_from_json(read_json_file(path), path); }

}  // namespace eitnoise::io
