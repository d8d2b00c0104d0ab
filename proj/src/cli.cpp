#include "wot/cli.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wot/io.hpp"
#include "wot/wot.hpp"

namespace wot {
namespace {

using io::json;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Parse, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, path + ": " + e.what());
  }
}

DiscreteMeasure read_measure(const std::string& path, const Tolerances& tol) {
  return io::measure_from_json(read_json(path), tol);
}

ConvexCost parse_cost(const std::string& text, const Tolerances& tol) {
  if (text == "abs") return ConvexCost::absolute();
  if (text.rfind("pow:", 0) == 0) {
    try {
      std::size_t used = 0;
      double e = std::stod(text.substr(4), &used);
      if (used != text.size() - 4) throw std::invalid_argument(text);
      return ConvexCost::power(e);
    } catch (const std::logic_error&) {
      fail(ErrorCode::BadCost, "cannot read exponent in '" + text + "'");
    }
  }
  if (text.rfind("pwl:", 0) == 0) return ConvexCost::piecewise_linear(io::pwl_from_json(read_json(text.substr(4))), tol);
  fail(ErrorCode::BadCost, "unknown cost '" + text + "'");
}

Lift parse_lift(const std::string& text, const DiscreteMeasure& mu, const Tolerances& tol) {
  if (text == "asc") return make_lift(mu, LiftKind::Ascending);
  if (text == "desc") return make_lift(mu, LiftKind::Descending);
  return make_lift(mu, io::lift_from_json(read_json(text)).slices, tol);
}

json monotonicity_report(const Coupling& pi, Regime regime) {
  json r;
  std::vector<double> m = martingale_points(pi);
  for (auto tag : {MonotonicityTag::FirstLeft, MonotonicityTag::FirstRight, MonotonicityTag::SecondLeft,
                   MonotonicityTag::SecondRight})
    r[std::string(to_string(tag))] = check_monotonicity(pi, {tag, regime, m});
  return r;
}

void emit(std::ostream& out, const json& j) { out << j.dump() << "\n"; }

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Weak optimal transport for discrete measures on the line"};
  app.require_subcommand(1);
  double eps = kDefaultTol.eps, tol_grid = kDefaultTol.grid;
  app.add_option("--eps", eps, "tolerance for potential inequalities and mass equalities")->capture_default_str();
  app.add_option("--tol-grid", tol_grid, "tolerance for projection diagnostics")->capture_default_str();

  std::string mu_path, nu_path, cost = "abs", kind = "pimin", lift = "asc", coupling_path, measure_path, out_path;
  std::string problem = "wot", potential = "put";
  bool steps = false;

  auto with_pair = [&](CLI::App* sub) {
    sub->add_option("--mu", mu_path, "source measure JSON")->required();
    sub->add_option("--nu", nu_path, "target measure JSON")->required();
  };
  CLI::App* value = app.add_subcommand("value", "print the WOT value");
  with_pair(value);
  value->add_option("--cost", cost, "abs | pow:P | pwl:FILE")->capture_default_str();
  CLI::App* dec = app.add_subcommand("decompose", "print the decomposition");
  with_pair(dec);
  CLI::App* sh = app.add_subcommand("shadow", "print the shadow of mu in nu");
  with_pair(sh);
  CLI::App* proj = app.add_subcommand("project", "print the projection and the optimal map");
  with_pair(proj);
  CLI::App* couple = app.add_subcommand("couple", "print a coupling");
  with_pair(couple);
  couple->add_option("--kind", kind, "pimin | pimax | shadow")->check(CLI::IsMember({"pimin", "pimax", "shadow"}));
  couple->add_option("--lift", lift, "asc | desc | FILE (shadow kind)")->capture_default_str();
  couple->add_flag("--steps", steps, "include the shadow increments (shadow kind)");
  CLI::App* check = app.add_subcommand("check", "check optimality and monotonicity of a coupling");
  with_pair(check);
  check->add_option("--coupling", coupling_path, "coupling JSON")->required();
  CLI::App* oracle = app.add_subcommand("oracle", "solve the LP oracle and compare with the closed form");
  with_pair(oracle);
  oracle->add_option("--problem", problem, "wot | cov-min | cov-max | min-target")
      ->check(CLI::IsMember({"wot", "cov-min", "cov-max", "min-target"}))
      ->capture_default_str();
  CLI::App* pot = app.add_subcommand("potentials", "write a potential function as CSV");
  pot->add_option("--measure", measure_path, "measure JSON")->required();
  pot->add_option("--out", out_path, "output CSV path")->required();
  pot->add_option("--kind", potential, "put | call | u")->check(CLI::IsMember({"put", "call", "u"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    emit(out, {{"error", "Usage"}, {"detail", e.what()}});
    return 1;
  }

  Tolerances tol;
  tol.eps = eps;
  tol.grid = tol_grid;
  try {
    if (*pot) {
      DiscreteMeasure m = read_measure(measure_path, tol);
      PwlFunction f = potential == "put" ? put_potential(m) : potential == "call" ? call_potential(m) : u_potential(m);
      std::ofstream csv(out_path);
      if (!csv) fail(ErrorCode::Parse, "cannot write '" + out_path + "'");
      write_csv(csv, f);
      emit(out, {{"written", out_path}, {"rows", f.breakpoints().size() + 2}});
      return 0;
    }
    DiscreteMeasure mu = read_measure(mu_path, tol), nu = read_measure(nu_path, tol);
    if (*value) {
      if (cost == "abs") {
        emit(out, {{"value", wot_value(mu, nu, tol)}});
      } else {
        emit(out, {{"value", wot_value_general(mu, nu, parse_cost(cost, tol), tol)}});
      }
    } else if (*dec) {
      emit(out, io::to_json(decompose(mu, nu, tol)));
    } else if (*sh) {
      emit(out, io::to_json(shadow(mu, nu, tol)));
    } else if (*proj) {
      Decomposition d = decompose(mu, nu, tol);
      MonotoneMap map = optimal_map(mu, nu, tol);
      DisplacementReport rep = displacement_profile(map, d.x_minus, d.x_plus, tol.grid);
      emit(out, {{"image", io::to_json(map.push_forward(mu, tol))},
                 {"map", io::to_json(map)},
                 {"displacement_non_increasing", rep.non_increasing},
                 {"displacement_sign_pattern", rep.sign_pattern}});
    } else if (*couple) {
      if (kind == "shadow") {
        LiftedCoupling lc = shadow_coupling(parse_lift(lift, mu, tol), nu, tol);
        emit(out, steps ? io::to_json(lc) : io::to_json(lc.flattened));
      } else {
        emit(out, io::to_json(extremal_covariance(mu, nu, kind == "pimin" ? Sense::Min : Sense::Max, tol)));
      }
    } else if (*check) {
      Coupling pi = io::coupling_from_json(read_json(coupling_path), tol);
      double violation = pistar_violation(pi, mu, nu, tol);
      Cutpoints cut = compute_cutpoints(mu, nu, tol);
      auto in = [&](Region r) {
        return [&, r](double x) { return region_of(x, cut.x_minus, cut.x_plus) == r; };
      };
      emit(out, {{"pistar", violation <= tol.eps},
                 {"violation", violation},
                 {"cost", barycentric_cost(pi)},
                 {"value", wot_value(mu, nu, tol)},
                 {"monotonicity",
                  {{"left", monotonicity_report(restrict_rows(pi, in(Region::Left)), Regime::Sub)},
                   {"middle", monotonicity_report(restrict_rows(pi, in(Region::Middle)), Regime::Super)},
                   {"right", monotonicity_report(restrict_rows(pi, in(Region::Right)), Regime::Super)}}}});
    } else if (*oracle) {
      double lp_value = 0.0, closed = 0.0;
      if (problem == "wot") {
        lp_value = wot_value_lp(mu, nu, tol).value;
        closed = wot_value(mu, nu, tol);
      } else if (problem == "min-target") {
        lp_value = min_target_lp(mu, nu, tol).value;
        DiscreteMeasure s = shadow(mu, nu, tol);
        closed = mu.empty() ? 0.0 : wot_value(mu, s, tol);
      } else {
        Sense sense = problem == "cov-min" ? Sense::Min : Sense::Max;
        CostMatrix xy = cost_matrix(mu, nu, [](double x, double y) { return x * y; });
        lp_value = constrained_ot_lp(mu, nu, xy, sense, tol).value;
        closed = covariance_integral(extremal_covariance(mu, nu, sense, tol));
      }
      emit(out, {{"problem", problem}, {"value", lp_value}, {"closed_form", closed}, {"gap", std::abs(lp_value - closed)}});
    }
  } catch (const Error& e) {
    emit(out, {{"error", std::string(to_string(e.code()))}, {"detail", e.detail()}});
    return e.is_internal() ? 2 : 1;
  }
  return 0;
}

}  // namespace wot
