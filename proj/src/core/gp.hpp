#pragma once

#include "core/types.hpp"

#include <string>
#include <vector>

namespace lsqp::gp {

/// c * prod_i x_i^{a_i} with c > 0, defined for x > 0.
struct Monomial {
  double coefficient{1.0};
  Vector exponents;
};

/// Sum of monomials.
struct Posynomial {
  std::vector<Monomial> terms;
};

/// Difference of posynomials: positive(x) - negative(x).
struct Signomial {
  Posynomial positive;
  Posynomial negative;
};

[[nodiscard]] double eval_monomial(const Monomial& m, const Vector& x,
                                   Vector* grad = nullptr);
[[nodiscard]] double eval_posynomial(const Posynomial& p, const Vector& x,
                                     Vector* grad = nullptr);
[[nodiscard]] double eval_signomial(const Signomial& s, const Vector& x,
                                    Vector* grad = nullptr);

/// Best local monomial model of a posynomial at x0 > 0:
/// exponents a_i = x_i dp/dx_i / p, coefficient chosen so values match at x0.
[[nodiscard]] Monomial monomial_approximation(const Posynomial& p,
                                              const Vector& x0);

[[nodiscard]] ScalarFunction to_scalar_function(Monomial m, std::string name);
[[nodiscard]] ScalarFunction to_scalar_function(Posynomial p, std::string name);
[[nodiscard]] ScalarFunction to_scalar_function(Signomial s, std::string name);

/// Structure census over a problem's objective and constraints, used to
/// decide whether the log-space variant is worth recommending.
struct CompatibilityReport {
  int n_monomial{0};
  int n_posynomial{0};
  int n_signomial{0};
  int n_opaque{0};
  double compatible_fraction{0.0};  // (monomial + posynomial) / total
  bool recommend_logspace{false};
  std::vector<std::pair<std::string, StructureClass>> entries;
};

[[nodiscard]] CompatibilityReport gp_compatibility_scan(const Problem& problem);

[[nodiscard]] std::string structure_name(StructureClass c);

/// Report serialized as a JSON object string.
[[nodiscard]] std::string report_to_json(const CompatibilityReport& report);

}  // namespace lsqp::gp
