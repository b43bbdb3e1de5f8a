#pragma once

#include <cstddef>

#include "qhd/error.hpp"

namespace qhd {

/// Bookkeeping between monad constants and quantum-scale constants:
/// m = N*mu, hbar = N*eta, M = n*m, total monads = n*N.
class MonadScale {
 public:
  MonadScale(double monads_per_particle, double monad_mass, double monad_action)
      : n_monads_(monads_per_particle), mu_(monad_mass), eta_(monad_action) {
    if (!(n_monads_ > 0.0) || !(mu_ > 0.0) || !(eta_ > 0.0))
      throw ValidationError("MonadScale: N, mu and eta must be strictly positive");
  }

  double monads_per_particle() const noexcept { return n_monads_; }
  double monad_mass() const noexcept { return mu_; }
  double monad_action() const noexcept { return eta_; }

  double mass() const noexcept { return n_monads_ * mu_; }
  double hbar() const noexcept { return n_monads_ * eta_; }
  double system_mass(std::size_t n_particles) const noexcept { return double(n_particles) * mass(); }
  double total_monads(std::size_t n_particles) const noexcept {
    return double(n_particles) * n_monads_;
  }
  /// Monad-scale constitutive coefficient c = -eta^2 / (4 mu).
  double monad_c() const noexcept { return -eta_ * eta_ / (4.0 * mu_); }

 private:
  double n_monads_;
  double mu_;
  double eta_;
};

}  // namespace qhd
