#include "core/gp.hpp"

#include <json.hpp>

#include <cmath>
#include <utility>

namespace lsqp::gp {

double eval_monomial(const Monomial& m, const Vector& x, Vector* grad) {
  const auto n = x.size();
  if (m.exponents.size() != n) {
    throw DimensionMismatch("monomial exponent vector does not match x");
  }
  double value = m.coefficient;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m.exponents[i] != 0.0) {
      value *= std::pow(x[i], m.exponents[i]);
    }
  }
  if (grad != nullptr) {
    grad->setZero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      (*grad)[i] = m.exponents[i] * value / x[i];
    }
  }
  return value;
}

double eval_posynomial(const Posynomial& p, const Vector& x, Vector* grad) {
  double value = 0.0;
  if (grad != nullptr) grad->setZero(x.size());
  Vector term_grad;
  for (const auto& term : p.terms) {
    value += eval_monomial(term, x, grad != nullptr ? &term_grad : nullptr);
    if (grad != nullptr) *grad += term_grad;
  }
  return value;
}

double eval_signomial(const Signomial& s, const Vector& x, Vector* grad) {
  Vector neg_grad;
  double value = eval_posynomial(s.positive, x, grad);
  value -= eval_posynomial(s.negative, x, grad != nullptr ? &neg_grad : nullptr);
  if (grad != nullptr) *grad -= neg_grad;
  return value;
}

Monomial monomial_approximation(const Posynomial& p, const Vector& x0) {
  Vector grad;
  const double value = eval_posynomial(p, x0, &grad);
  if (!(value > 0.0)) {
    throw NumericalBreakdown("monomial approximation requires p(x0) > 0");
  }
  Monomial m;
  m.exponents = x0.cwiseProduct(grad) / value;
  double scale = 1.0;
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    scale *= std::pow(x0[i], m.exponents[i]);
  }
  m.coefficient = value / scale;
  return m;
}

ScalarFunction to_scalar_function(Monomial m, std::string name) {
  ScalarFunction f;
  f.structure = StructureClass::Monomial;
  f.name = std::move(name);
  f.eval = [m = std::move(m)](const Vector& x, double& value, Vector* grad) {
    value = eval_monomial(m, x, grad);
  };
  return f;
}

ScalarFunction to_scalar_function(Posynomial p, std::string name) {
  ScalarFunction f;
  f.structure = StructureClass::Posynomial;
  f.name = std::move(name);
  f.eval = [p = std::move(p)](const Vector& x, double& value, Vector* grad) {
    value = eval_posynomial(p, x, grad);
  };
  return f;
}

ScalarFunction to_scalar_function(Signomial s, std::string name) {
  ScalarFunction f;
  f.structure = StructureClass::Signomial;
  f.name = std::move(name);
  f.eval = [s = std::move(s)](const Vector& x, double& value, Vector* grad) {
    value = eval_signomial(s, x, grad);
  };
  return f;
}

namespace {

void tally(const ScalarFunction& f, CompatibilityReport& report) {
  switch (f.structure) {
    case StructureClass::Monomial: ++report.n_monomial; break;
    case StructureClass::Posynomial: ++report.n_posynomial; break;
    case StructureClass::Signomial: ++report.n_signomial; break;
    case StructureClass::Opaque: ++report.n_opaque; break;
  }
  report.entries.emplace_back(f.name, f.structure);
}

}  // namespace

CompatibilityReport gp_compatibility_scan(const Problem& problem) {
  CompatibilityReport report;
  tally(problem.objective, report);
  for (const auto& g : problem.ineq_constraints) tally(g, report);
  for (const auto& h : problem.eq_constraints) tally(h, report);
  const int total = static_cast<int>(report.entries.size());
  if (total > 0) {
    report.compatible_fraction =
        static_cast<double>(report.n_monomial + report.n_posynomial) / total;
  }
  report.recommend_logspace = report.compatible_fraction >= 0.5;
  return report;
}

std::string structure_name(StructureClass c) {
  switch (c) {
    case StructureClass::Monomial: return "monomial";
    case StructureClass::Posynomial: return "posynomial";
    case StructureClass::Signomial: return "signomial";
    case StructureClass::Opaque: return "opaque";
  }
  return "opaque";
}

std::string report_to_json(const CompatibilityReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [name, structure] : report.entries) {
    entries.push_back({{"name", name}, {"structure", structure_name(structure)}});
  }
  const nlohmann::json j = {
      {"monomial", report.n_monomial},
      {"posynomial", report.n_posynomial},
      {"signomial", report.n_signomial},
      {"opaque", report.n_opaque},
      {"compatible_fraction", report.compatible_fraction},
      {"recommend_logspace", report.recommend_logspace},
      {"entries", entries},
  };
  return j.dump(2);
}

}  // namespace lsqp::gp
