#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "wot/coupling.hpp"
#include "wot/decomposition.hpp"
#include "wot/errors.hpp"
#include "wot/measure.hpp"
#include "wot/projection.hpp"
#include "wot/shadow.hpp"

namespace wot::io {

using nlohmann::json;

inline json extended_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double extended_from_json(const json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    fail(ErrorCode::Parse, "unknown extended real '" + s + "'");
  }
  if (!j.is_number()) fail(ErrorCode::Parse, "expected a number");
  return j.get<double>();
}

inline json to_json(const DiscreteMeasure& m) {
  json atoms = json::array();
  for (const Atom& a : m.atoms()) atoms.push_back({{"x", a.x}, {"w", a.w}});
  return {{"atoms", atoms}};
}

inline double number_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_number())
    fail(ErrorCode::Parse, std::string("missing numeric field '") + key + "'");
  return j[key].get<double>();
}

inline DiscreteMeasure measure_from_json(const json& j, const Tolerances& tol = kDefaultTol) {
  if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array())
    fail(ErrorCode::Parse, "measure needs an 'atoms' array");
  std::vector<Atom> atoms;
  for (const json& a : j["atoms"]) atoms.push_back({number_field(a, "x"), number_field(a, "w")});
  return DiscreteMeasure::from_atoms(std::move(atoms), tol);
}

inline json to_json(const Coupling& pi) {
  json entries = json::array();
  for (const auto& e : pi.entries()) entries.push_back({{"i", e.i}, {"j", e.j}, {"m", e.m}});
  return {{"source", to_json(pi.source())}, {"target", to_json(pi.target())}, {"entries", entries}};
}

inline Coupling coupling_from_json(const json& j, const Tolerances& tol = kDefaultTol) {
  if (!j.is_object() || !j.contains("source") || !j.contains("target") || !j.contains("entries") ||
      !j["entries"].is_array())
    fail(ErrorCode::Parse, "coupling needs 'source', 'target' and 'entries'");
  std::vector<Coupling::Entry> raw;
  for (const json& e : j["entries"]) {
    double i = number_field(e, "i"), jj = number_field(e, "j");
    if (i < 0 || jj < 0 || i != std::floor(i) || jj != std::floor(jj)) fail(ErrorCode::Parse, "bad entry index");
    raw.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(jj), number_field(e, "m")});
  }
  return Coupling::from_entries(measure_from_json(j["source"], tol), measure_from_json(j["target"], tol), raw, tol);
}

inline json to_json(const Decomposition& d) {
  return {{"p", d.p},
          {"c", d.c},
          {"x_minus", extended_to_json(d.x_minus)},
          {"x_plus", extended_to_json(d.x_plus)},
          {"delta_minus", d.delta_minus},
          {"delta_plus", d.delta_plus},
          {"components",
           {{"eta_minus", to_json(d.eta_minus)},
            {"eta_zero", to_json(d.eta_zero)},
            {"eta_plus", to_json(d.eta_plus)},
            {"chi_minus", to_json(d.chi_minus)},
            {"chi_zero", to_json(d.chi_zero)},
            {"chi_plus", to_json(d.chi_plus)}}}};
}

inline Decomposition decomposition_from_json(const json& j, const Tolerances& tol = kDefaultTol) {
  Decomposition d;
  d.p = number_field(j, "p");
  d.c = number_field(j, "c");
  if (!j.contains("x_minus") || !j.contains("x_plus") || !j.contains("components"))
    fail(ErrorCode::Parse, "decomposition is missing fields");
  d.x_minus = extended_from_json(j["x_minus"]);
  d.x_plus = extended_from_json(j["x_plus"]);
  d.delta_minus = number_field(j, "delta_minus");
  d.delta_plus = number_field(j, "delta_plus");
  const json& c = j["components"];
  auto part = [&](const char* key) {
    if (!c.contains(key)) fail(ErrorCode::Parse, std::string("missing component '") + key + "'");
    return measure_from_json(c[key], tol);
  };
  d.eta_minus = part("eta_minus");
  d.eta_zero = part("eta_zero");
  d.eta_plus = part("eta_plus");
  d.chi_minus = part("chi_minus");
  d.chi_zero = part("chi_zero");
  d.chi_plus = part("chi_plus");
  return d;
}

inline json to_json(const MonotoneMap& m) {
  json samples = json::array();
  for (const MapSample& s : m.samples()) samples.push_back({{"x", s.x}, {"t", s.t}});
  return {{"samples", samples}};
}

inline MonotoneMap map_from_json(const json& j) {
  if (!j.is_object() || !j.contains("samples") || !j["samples"].is_array())
    fail(ErrorCode::Parse, "map needs a 'samples' array");
  std::vector<MapSample> s;
  for (const json& e : j["samples"]) s.push_back({number_field(e, "x"), number_field(e, "t")});
  return MonotoneMap(std::move(s));
}

inline json to_json(const Lift& lift) {
  json slices = json::array();
  for (const Slice& s : lift.slices) slices.push_back({{"m", s.m}, {"x", s.x}});
  return {{"slices", slices}};
}

inline Lift lift_from_json(const json& j) {
  if (!j.is_object() || !j.contains("slices") || !j["slices"].is_array())
    fail(ErrorCode::Parse, "lift needs a 'slices' array");
  Lift lift;
  for (const json& e : j["slices"]) lift.slices.push_back({number_field(e, "m"), number_field(e, "x")});
  return lift;
}

inline json to_json(const LiftedCoupling& lc) {
  json steps = json::array();
  for (const ShadowStep& s : lc.steps) steps.push_back({{"x", s.x}, {"m", s.m}, {"increment", to_json(s.increment)}});
  return {{"steps", steps}, {"coupling", to_json(lc.flattened)}};
}

inline LiftedCoupling lifted_coupling_from_json(const json& j, const Tolerances& tol = kDefaultTol) {
  if (!j.is_object() || !j.contains("steps") || !j["steps"].is_array() || !j.contains("coupling"))
    fail(ErrorCode::Parse, "lifted coupling needs 'steps' and 'coupling'");
  LiftedCoupling lc;
  for (const json& s : j["steps"]) {
    if (!s.contains("increment")) fail(ErrorCode::Parse, "step needs an 'increment'");
    lc.steps.push_back({number_field(s, "x"), number_field(s, "m"), measure_from_json(s["increment"], tol)});
  }
  lc.flattened = coupling_from_json(j["coupling"], tol);
  return lc;
}

/// Piecewise-linear cost file: {"breakpoints":[..],"values":[..],"slope_left":..,"slope_right":..}.
inline PwlFunction pwl_from_json(const json& j) {
  if (!j.is_object() || !j.contains("breakpoints") || !j.contains("values"))
    fail(ErrorCode::Parse, "piecewise-linear function needs 'breakpoints' and 'values'");
  try {
    return PwlFunction::from_points(j["breakpoints"].get<std::vector<double>>(), j["values"].get<std::vector<double>>(),
                                    number_field(j, "slope_left"), number_field(j, "slope_right"));
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, e.what());
  }
}

}  // namespace wot::io
