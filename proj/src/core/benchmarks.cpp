#include "core/benchmarks.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <utility>

namespace lsqp::bench {

namespace {

using gp::Monomial;
using gp::Posynomial;
using gp::Signomial;

[[nodiscard]] Monomial mono(int n_vars, double coefficient,
                            std::initializer_list<std::pair<int, double>>
                                exponents) {
  Monomial m;
  m.coefficient = coefficient;
  m.exponents = Vector::Zero(n_vars);
  for (const auto& [index, power] : exponents) m.exponents[index] = power;
  return m;
}

}  // namespace

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Success: return "Success";
    case Outcome::LocalOptimum: return "LocalOptimum";
    case Outcome::MaxIter: return "MaxIter";
    case Outcome::LineSearchFailure: return "LineSearchFailure";
    case Outcome::TransformFailure: return "TransformFailure";
  }
  return "Unknown";
}

Outcome classify(const BenchmarkCase& c, const SolveResult& r) {
  switch (r.termination) {
    case Termination::MaxIter: return Outcome::MaxIter;
    case Termination::LineSearchFailure: return Outcome::LineSearchFailure;
    case Termination::TransformFailure: return Outcome::TransformFailure;
    case Termination::GradLagrangian:
    case Termination::SmallStep: break;
  }
  const double f_star = c.optimum.f;
  if (std::abs(r.f_final - f_star) >
      c.tolerances.objective_rel * std::abs(f_star)) {
    return Outcome::LocalOptimum;
  }
  for (Eigen::Index i = 0; i < c.optimum.x.size(); ++i) {
    if (std::abs(r.x_final[i] - c.optimum.x[i]) >
        c.tolerances.variable_rel * std::abs(c.optimum.x[i])) {
      return Outcome::LocalOptimum;
    }
  }
  return Outcome::Success;
}

BenchmarkCase boyd_problem() {
  constexpr int n = 3;  // h, w, d
  constexpr double kWallArea = 100.0;
  constexpr double kFloorArea = 1000.0;
  constexpr double kAlpha = 0.5;  // lower bound on h/w
  constexpr double kBeta = 2.0;   // upper bound on h/w
  constexpr double kGamma = 0.5;  // lower bound on d/w
  constexpr double kDelta = 2.0;  // upper bound on d/w

  BenchmarkCase c;
  c.name = "boyd";
  Problem& p = c.problem;
  p.n_vars = n;
  p.lower_bounds = Vector::Constant(n, kDefaultVariableFloor);
  p.variable_names = {"h", "w", "d"};
  p.objective = gp::to_scalar_function(
      mono(n, 1.0, {{0, -1.0}, {1, -1.0}, {2, -1.0}}), "inverse_volume");

  auto add = [&p](ScalarFunction f) {
    p.ineq_constraints.push_back(std::move(f));
  };
  add(gp::to_scalar_function(
      Posynomial{{mono(n, 2.0 / kWallArea, {{0, 1.0}, {1, 1.0}}),
                  mono(n, 2.0 / kWallArea, {{0, 1.0}, {2, 1.0}})}},
      "wall_area"));
  add(gp::to_scalar_function(mono(n, 1.0 / kFloorArea, {{1, 1.0}, {2, 1.0}}),
                             "floor_area"));
  add(gp::to_scalar_function(mono(n, kAlpha, {{1, 1.0}, {0, -1.0}}),
                             "aspect_hw_low"));
  add(gp::to_scalar_function(mono(n, 1.0 / kBeta, {{0, 1.0}, {1, -1.0}}),
                             "aspect_hw_high"));
  add(gp::to_scalar_function(mono(n, kGamma, {{1, 1.0}, {2, -1.0}}),
                             "aspect_dw_low"));
  add(gp::to_scalar_function(mono(n, 1.0 / kDelta, {{2, 1.0}, {1, -1.0}}),
                             "aspect_dw_high"));

  const double sqrt3 = std::sqrt(3.0);
  c.optimum.x = Vector(n);
  c.optimum.x << 5.0 / sqrt3, 10.0 / sqrt3, 20.0 / sqrt3;
  c.optimum.f = 3.0 * sqrt3 / 1000.0;
  return c;
}

BenchmarkCase rosenbrock_problem() {
  constexpr int n = 2;  // x, y

  BenchmarkCase c;
  c.name = "rosenbrock";
  Problem& p = c.problem;
  p.n_vars = n;
  p.lower_bounds = Vector::Constant(n, kDefaultVariableFloor);
  p.variable_names = {"x", "y"};

  // (1 - x)^2 + 100 (y - x^2)^2 + 1, expanded into positive and negative
  // monomial parts.
  p.objective = gp::to_scalar_function(
      Signomial{Posynomial{{mono(n, 2.0, {}), mono(n, 1.0, {{0, 2.0}}),
                            mono(n, 100.0, {{1, 2.0}}),
                            mono(n, 100.0, {{0, 4.0}})}},
                Posynomial{{mono(n, 2.0, {{0, 1.0}}),
                            mono(n, 200.0, {{0, 2.0}, {1, 1.0}})}}},
      "shifted_rosenbrock");

  auto add = [&p](ScalarFunction f) {
    p.ineq_constraints.push_back(std::move(f));
  };
  // (x - 1)^3 - y + 2 <= 1, expanded.
  add(gp::to_scalar_function(
      Signomial{Posynomial{{mono(n, 1.0, {{0, 3.0}}), mono(n, 3.0, {{0, 1.0}}),
                            mono(n, 1.0, {})}},
                Posynomial{{mono(n, 3.0, {{0, 2.0}}),
                            mono(n, 1.0, {{1, 1.0}})}}},
      "cubic_cut"));
  // x + y - 1 <= 1.
  add(gp::to_scalar_function(
      Signomial{Posynomial{{mono(n, 1.0, {{0, 1.0}}),
                            mono(n, 1.0, {{1, 1.0}})}},
                Posynomial{{mono(n, 1.0, {})}}},
      "linear_cut"));
  add(gp::to_scalar_function(mono(n, 1.0 / 1.5, {{0, 1.0}}), "x_ceiling"));
  add(gp::to_scalar_function(mono(n, 1.0 / 2.5, {{1, 1.0}}), "y_ceiling"));

  c.optimum.x = Vector(n);
  c.optimum.x << 1.0, 1.0;
  c.optimum.f = 1.0;
  c.default_options.trust_fractions = {0.2, 0.5, 1.0};
  return c;
}

BenchmarkCase floudas_problem() {
  constexpr int n = 8;

  BenchmarkCase c;
  c.name = "floudas";
  Problem& p = c.problem;
  p.n_vars = n;
  p.lower_bounds = Vector(n);
  p.lower_bounds << 100.0, 1000.0, 1000.0, 10.0, 10.0, 10.0, 10.0, 10.0;
  p.variable_names = {"x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"};
  p.objective = gp::to_scalar_function(
      Posynomial{{mono(n, 1.0, {{0, 1.0}}), mono(n, 1.0, {{1, 1.0}}),
                  mono(n, 1.0, {{2, 1.0}})}},
      "exchanger_area");

  auto add = [&p](ScalarFunction f) {
    p.ineq_constraints.push_back(std::move(f));
  };
  add(gp::to_scalar_function(
      Signomial{
          Posynomial{{mono(n, 833.33252, {{3, 1.0}, {0, -1.0}, {5, -1.0}}),
                      mono(n, 100.0, {{5, -1.0}})}},
          Posynomial{{mono(n, 83333.333, {{0, -1.0}, {5, -1.0}})}}},
      "heat_balance_1"));
  add(gp::to_scalar_function(
      Signomial{
          Posynomial{{mono(n, 1250.0, {{4, 1.0}, {1, -1.0}, {6, -1.0}}),
                      mono(n, 1.0, {{3, 1.0}, {6, -1.0}})}},
          Posynomial{{mono(n, 1250.0, {{3, 1.0}, {1, -1.0}, {6, -1.0}})}}},
      "heat_balance_2"));
  add(gp::to_scalar_function(
      Signomial{
          Posynomial{{mono(n, 1.25e6, {{2, -1.0}, {7, -1.0}}),
                      mono(n, 1.0, {{4, 1.0}, {7, -1.0}})}},
          Posynomial{{mono(n, 2500.0, {{4, 1.0}, {2, -1.0}, {7, -1.0}})}}},
      "heat_balance_3"));
  add(gp::to_scalar_function(
      Posynomial{{mono(n, 0.0025, {{3, 1.0}}), mono(n, 0.0025, {{5, 1.0}})}},
      "temperature_spread_1"));
  add(gp::to_scalar_function(
      Signomial{Posynomial{{mono(n, 0.0025, {{4, 1.0}}),
                            mono(n, 0.0025, {{6, 1.0}})}},
                Posynomial{{mono(n, 0.0025, {{3, 1.0}})}}},
      "temperature_spread_2"));
  add(gp::to_scalar_function(
      Signomial{Posynomial{{mono(n, 0.01, {{7, 1.0}})}},
                Posynomial{{mono(n, 0.01, {{4, 1.0}})}}},
      "temperature_spread_3"));

  c.optimum.x = Vector(n);
  c.optimum.x << 579.30668443775926, 1359.9706680433942, 5109.9706680475038,
      182.0176995821559, 295.60117327809962, 217.98230041784407,
      286.4165263040565, 395.60117327809945;
  c.optimum.f = 7049.2480205286574;
  return c;
}

namespace {

// Variable indices for the aircraft-sizing problem.
enum KoVar : int {
  iWf = 0,      // mission fuel weight [N]
  iA,           // aspect ratio
  iS,           // wing planform area [m^2]
  iV,           // cruise speed [m/s]
  iCL,          // lift coefficient
  iCD,          // drag coefficient
  iCf,          // skin friction coefficient
  iRe,          // Reynolds number
  iD,           // drag force [N]
  iW,           // total aircraft weight [N]
  iWw,          // wing weight [N]
  iWwSurf,      // wing surface weight [N]
  iWwStrc,      // wing structural weight [N]
  iVf,          // required fuel volume [m^3]
  iVfAvail,     // available fuel volume [m^3]
  iVfFuse,      // fuselage fuel volume [m^3]
  iVfWing,      // wing fuel volume [m^3]
  iT,           // flight time [s]
  kKoVarCount,
};

const std::vector<std::string> kKoVariableNames = {
    "W_f", "A",   "S",        "V",        "C_L",       "C_D",
    "C_f", "Re",  "D",        "W",        "W_w",       "W_w_surf",
    "W_w_strc",   "V_f",      "V_f_avail", "V_f_fuse", "V_f_wing", "t"};

const std::vector<std::string> kKoConstantNames = {
    "W_0",   "rho",   "rho_f", "mu",    "g",     "N_ult",
    "C_Ww1", "C_Ww2", "V_min", "C_Lmax", "R",    "c_T",
    "tau",   "CDA0",  "k",     "S_wetratio", "e"};

/// Wing structural weight requirement
///   C A^1.5 sqrt((W_0 + g rho_f V_f_fuse) W S) / W_w_strc <= 1,
/// with C = C_Ww2 N_ult / tau. GP-compatible after squaring (the square root
/// of a posynomial bounded by a monomial), hence tagged posynomial for the
/// structure census.
[[nodiscard]] ScalarFunction wing_structure_constraint(double C, double W_0,
                                                       double g_rho_f) {
  ScalarFunction f;
  f.structure = StructureClass::Posynomial;
  f.name = "wing_structural_weight";
  f.eval = [C, W_0, g_rho_f](const Vector& x, double& value, Vector* grad) {
    const double loaded = W_0 + g_rho_f * x[iVfFuse];
    const double root = std::sqrt(loaded * x[iW] * x[iS]);
    value = C * std::pow(x[iA], 1.5) * root / x[iWwStrc];
    if (grad != nullptr) {
      grad->setZero(x.size());
      (*grad)[iA] = 1.5 * value / x[iA];
      (*grad)[iW] = 0.5 * value / x[iW];
      (*grad)[iS] = 0.5 * value / x[iS];
      (*grad)[iWwStrc] = -value / x[iWwStrc];
      (*grad)[iVfFuse] = 0.5 * value * g_rho_f / loaded;
    }
  };
  return f;
}

}  // namespace

const std::map<std::string, double>& kirschen_ozturk_default_constants() {
  static const std::map<std::string, double> kDefaults = {
      {"W_0", 4940.0},       // empty aircraft weight [N]
      {"rho", 1.23},         // air density [kg/m^3]
      {"rho_f", 804.0},      // fuel density [kg/m^3]
      {"mu", 1.78e-5},       // air viscosity [kg/(m s)]
      {"g", 9.81},           // gravitational acceleration [m/s^2]
      {"N_ult", 2.5},        // ultimate load factor
      {"C_Ww1", 45.24},      // wing surface weight coefficient [N/m^2]
      {"C_Ww2", 8.71e-5},    // wing structural weight coefficient [1/m]
      {"V_min", 22.0},       // stall speed limit [m/s]
      {"C_Lmax", 1.5},       // maximum lift coefficient
      {"R", 1.0e6},          // mission range [m]
      {"c_T", 0.4 / 3600.0}, // thrust specific fuel consumption [1/s]
      {"tau", 0.12},         // airfoil thickness-to-chord ratio
      {"CDA0", 0.031},       // fuselage drag area [m^2]
      {"k", 1.2},            // form factor
      {"S_wetratio", 2.05},  // wetted area ratio
      {"e", 0.97},           // Oswald efficiency factor
  };
  return kDefaults;
}

BenchmarkCase kirschen_ozturk_problem() {
  return kirschen_ozturk_problem(kirschen_ozturk_default_constants());
}

BenchmarkCase kirschen_ozturk_problem(
    const std::map<std::string, double>& constants) {
  std::string missing;
  for (const auto& name : kKoConstantNames) {
    if (constants.find(name) == constants.end()) {
      missing += missing.empty() ? name : ", " + name;
    }
  }
  if (!missing.empty()) {
    throw MissingConstants("constant table is missing: " + missing);
  }
  for (const auto& [name, value] : constants) {
    if (std::find(kKoConstantNames.begin(), kKoConstantNames.end(), name) ==
        kKoConstantNames.end()) {
      throw std::invalid_argument("unknown constant: " + name);
    }
    (void)value;
  }

  const double W_0 = constants.at("W_0");
  const double rho = constants.at("rho");
  const double rho_f = constants.at("rho_f");
  const double mu = constants.at("mu");
  const double g = constants.at("g");
  const double N_ult = constants.at("N_ult");
  const double C_Ww1 = constants.at("C_Ww1");
  const double C_Ww2 = constants.at("C_Ww2");
  const double V_min = constants.at("V_min");
  const double C_Lmax = constants.at("C_Lmax");
  const double R = constants.at("R");
  const double c_T = constants.at("c_T");
  const double tau = constants.at("tau");
  const double CDA0 = constants.at("CDA0");
  const double k = constants.at("k");
  const double S_wetratio = constants.at("S_wetratio");
  const double e = constants.at("e");
  const double pi = std::acos(-1.0);

  constexpr int n = kKoVarCount;
  BenchmarkCase c;
  c.name = "kirschen_ozturk";
  Problem& p = c.problem;
  p.n_vars = n;
  p.lower_bounds = Vector::Constant(n, kDefaultVariableFloor);
  p.variable_names = kKoVariableNames;
  p.metadata["units"] = "SI";
  p.objective =
      gp::to_scalar_function(mono(n, 1.0, {{iWf, 1.0}}), "fuel_weight");

  auto add = [&p](ScalarFunction f) {
    p.ineq_constraints.push_back(std::move(f));
  };
  // Fuel burnt over the mission covers thrust work: c_T t D <= W_f.
  add(gp::to_scalar_function(
      mono(n, c_T, {{iT, 1.0}, {iD, 1.0}, {iWf, -1.0}}), "engine_fuel_burn"));
  // Flight time covers the range: R <= V t.
  add(gp::to_scalar_function(mono(n, R, {{iV, -1.0}, {iT, -1.0}}), "range"));
  // Drag definition: 0.5 rho V^2 S C_D <= D.
  add(gp::to_scalar_function(
      mono(n, 0.5 * rho, {{iV, 2.0}, {iS, 1.0}, {iCD, 1.0}, {iD, -1.0}}),
      "drag_definition"));
  // Drag coefficient breakdown: fuselage + skin friction + induced.
  add(gp::to_scalar_function(
      Posynomial{{mono(n, CDA0, {{iS, -1.0}, {iCD, -1.0}}),
                  mono(n, k * S_wetratio, {{iCf, 1.0}, {iCD, -1.0}}),
                  mono(n, 1.0 / (pi * e),
                       {{iCL, 2.0}, {iA, -1.0}, {iCD, -1.0}})}},
      "drag_breakdown"));
  // Turbulent flat-plate skin friction: 0.074 Re^-0.2 <= C_f.
  add(gp::to_scalar_function(mono(n, 0.074, {{iRe, -0.2}, {iCf, -1.0}}),
                             "skin_friction"));
  // Reynolds number at the mean chord: mu Re <= rho V sqrt(S/A).
  add(gp::to_scalar_function(
      mono(n, mu / rho, {{iRe, 1.0}, {iV, -1.0}, {iS, -0.5}, {iA, 0.5}}),
      "reynolds_definition"));
  // Steady level flight at the cruise midpoint weight.
  add(gp::to_scalar_function(
      Posynomial{{mono(n, 2.0 * W_0 / rho, {{iV, -2.0}, {iS, -1.0}, {iCL, -1.0}}),
                  mono(n, 2.0 / rho,
                       {{iWw, 1.0}, {iV, -2.0}, {iS, -1.0}, {iCL, -1.0}}),
                  mono(n, 1.0 / rho,
                       {{iWf, 1.0}, {iV, -2.0}, {iS, -1.0}, {iCL, -1.0}})}},
      "steady_level_flight"));
  // Stall margin: W <= 0.5 rho V_min^2 S C_Lmax.
  add(gp::to_scalar_function(
      mono(n, 2.0 / (rho * V_min * V_min * C_Lmax), {{iW, 1.0}, {iS, -1.0}}),
      "stall_speed"));
  // Total weight: W_0 + W_w + W_f <= W.
  add(gp::to_scalar_function(
      Posynomial{{mono(n, W_0, {{iW, -1.0}}),
                  mono(n, 1.0, {{iWw, 1.0}, {iW, -1.0}}),
                  mono(n, 1.0, {{iWf, 1.0}, {iW, -1.0}})}},
      "total_weight"));
  // Wing weight split: surface + structural <= total wing weight.
  add(gp::to_scalar_function(
      Posynomial{{mono(n, 1.0, {{iWwSurf, 1.0}, {iWw, -1.0}}),
                  mono(n, 1.0, {{iWwStrc, 1.0}, {iWw, -1.0}})}},
      "wing_weight_split"));
  // Wing surface weight: C_Ww1 S <= W_w_surf.
  add(gp::to_scalar_function(mono(n, C_Ww1, {{iS, 1.0}, {iWwSurf, -1.0}}),
                             "wing_surface_weight"));
  add(wing_structure_constraint(C_Ww2 * N_ult / tau, W_0, g * rho_f));
  // Required fuel volume fits in the tanks: V_f <= V_f_avail.
  add(gp::to_scalar_function(mono(n, 1.0, {{iVf, 1.0}, {iVfAvail, -1.0}}),
                             "fuel_volume_availability"));
  // V_f_avail - V_f_wing - V_f_fuse <= 0, shifted by one to keep a positive
  // standard form.
  add(gp::to_scalar_function(
      Signomial{Posynomial{{mono(n, 1.0, {{iVfAvail, 1.0}}), mono(n, 1.0, {})}},
                Posynomial{{mono(n, 1.0, {{iVfWing, 1.0}}),
                            mono(n, 1.0, {{iVfFuse, 1.0}})}}},
      "fuel_volume_balance"));
  // Wing tank geometry: V_f_wing^2 <= 0.0009 S^3 tau^2 / A.
  add(gp::to_scalar_function(
      mono(n, 1.0 / (0.0009 * tau * tau),
           {{iVfWing, 2.0}, {iA, 1.0}, {iS, -3.0}}),
      "wing_fuel_volume"));
  // Fuselage tank capacity: V_f_fuse <= 10 CDA0.
  add(gp::to_scalar_function(mono(n, 1.0 / (10.0 * CDA0), {{iVfFuse, 1.0}}),
                             "fuselage_fuel_volume"));
  // Fuel weight from its volume: g rho_f V_f = W_f.
  p.eq_constraints.push_back(gp::to_scalar_function(
      mono(n, g * rho_f, {{iVf, 1.0}, {iWf, -1.0}}), "fuel_weight_volume"));

  c.optimum.x = Vector(n);
  c.optimum.x << 755.64072600147824, 6.5245557355948733, 15.992958290166989,
      53.992143980993866, 0.23586653707646563, 0.012806291184003173,
      0.0032804301692351324, 5841234.101628907, 367.18796588557109,
      7140.6959469766571, 1445.055220975182, 723.52143304715469,
      721.533787928028, 0.095805468833391458, 0.095805468833391458,
      0.0056649123295542244, 0.090140556503837149, 18521.213018546099;
  c.optimum.f = 755.64072600147824;
  return c;
}

std::vector<std::string> benchmark_names() {
  return {"boyd", "rosenbrock", "floudas", "kirschen_ozturk"};
}

BenchmarkCase make_benchmark(const std::string& name,
                             const std::string& config_json) {
  nlohmann::json config = nlohmann::json::object();
  if (!config_json.empty()) {
    try {
      config = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(std::string("bad config JSON: ") + e.what());
    }
    if (!config.is_object()) {
      throw std::invalid_argument("config JSON must be an object");
    }
  }

  const bool has_constants = config.contains("constants");
  if (has_constants && name != "kirschen_ozturk") {
    throw std::invalid_argument("only kirschen_ozturk takes a constant table");
  }

  if (name == "boyd") return boyd_problem();
  if (name == "rosenbrock") return rosenbrock_problem();
  if (name == "floudas") return floudas_problem();
  if (name == "kirschen_ozturk") {
    if (!has_constants) return kirschen_ozturk_problem();
    std::map<std::string, double> table;
    for (const auto& [key, value] : config.at("constants").items()) {
      if (!value.is_number()) {
        throw std::invalid_argument("constant " + key + " must be a number");
      }
      table[key] = value.get<double>();
    }
    return kirschen_ozturk_problem(table);
  }
  throw UnknownProblem("unknown benchmark: " + name);
}

}  // namespace lsqp::bench
