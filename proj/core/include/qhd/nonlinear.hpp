#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <variant>

#include "qhd/error.hpp"

namespace qhd {

struct NoNonlinearity {};
/// U(rho) = a rho
struct CubicNonlinearity {
  double a;
};
/// U(rho) = b ln rho
struct LogarithmicNonlinearity {
  double b;
};

/// Nonlinear potential U(rho) in the density-dependent part of the
/// constitutive equations. Logarithmic evaluations clamp rho to the density
/// floor supplied by the caller.
class NonlinearTerm {
 public:
  using Variant = std::variant<NoNonlinearity, CubicNonlinearity, LogarithmicNonlinearity>;

  NonlinearTerm() = default;
  static NonlinearTerm none() { return {}; }
  static NonlinearTerm cubic(double a) { return NonlinearTerm(CubicNonlinearity{a}); }
  static NonlinearTerm logarithmic(double b) { return NonlinearTerm(LogarithmicNonlinearity{b}); }

  bool is_none() const noexcept { return std::holds_alternative<NoNonlinearity>(term_); }
  const Variant& variant() const noexcept { return term_; }

  /// U(rho).
  double potential(double rho, double floor) const {
    if (const auto* c = std::get_if<CubicNonlinearity>(&term_)) return c->a * rho;
    if (const auto* l = std::get_if<LogarithmicNonlinearity>(&term_))
      return l->b * std::log(std::max(rho, floor));
    return 0.0;
  }

  /// Diagonal stress (1/rho) * integral of rho U'(rho) d rho, integration constant 0.
  double stress(double rho) const {
    if (const auto* c = std::get_if<CubicNonlinearity>(&term_)) return 0.5 * c->a * rho;
    if (const auto* l = std::get_if<LogarithmicNonlinearity>(&term_)) return l->b;
    return 0.0;
  }

  /// Energy density F(rho) with F'(rho) = U(rho).
  double energy_density(double rho, double floor) const {
    if (const auto* c = std::get_if<CubicNonlinearity>(&term_)) return 0.5 * c->a * rho * rho;
    if (const auto* l = std::get_if<LogarithmicNonlinearity>(&term_))
      return l->b * rho * (std::log(std::max(rho, floor)) - 1.0);
    return 0.0;
  }

  std::string describe() const {
    if (const auto* c = std::get_if<CubicNonlinearity>(&term_)) return "cubic a=" + std::to_string(c->a);
    if (const auto* l = std::get_if<LogarithmicNonlinearity>(&term_))
      return "log b=" + std::to_string(l->b);
    return "none";
  }

 private:
  explicit NonlinearTerm(Variant v) : term_(v) {
    std::visit(
        [](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, CubicNonlinearity>) {
            if (!std::isfinite(t.a)) throw ValidationError("cubic coefficient must be finite");
          } else if constexpr (std::is_same_v<T, LogarithmicNonlinearity>) {
            if (!std::isfinite(t.b)) throw ValidationError("log coefficient must be finite");
          }
        },
        term_);
  }

  Variant term_{NoNonlinearity{}};
};

/// Coefficient c of the curvature term in the stress tensor plus the
/// nonlinear part. At the normalised quantum scale c = -hbar^2 / (4m).
struct ConstitutiveParams {
  double c = 0.0;
  NonlinearTerm nonlinear;

  static ConstitutiveParams quantum(double hbar, double mass, NonlinearTerm nl = {}) {
    if (!(hbar > 0.0) || !(mass > 0.0)) throw ValidationError("hbar and mass must be > 0");
    return {-hbar * hbar / (4.0 * mass), nl};
  }
  /// c = 0: only the Eulerian U(rho) part.
  static ConstitutiveParams classical(NonlinearTerm nl = {}) { return {0.0, nl}; }
};

}  // namespace qhd
