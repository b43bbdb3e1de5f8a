#include "qhd/potential.hpp"

#include <algorithm>
#include <cmath>

#include "qhd/error.hpp"

namespace qhd {

namespace {

double linear_lookup(const std::vector<double>& xs, const std::vector<double>& vs, double x) {
  if (x <= xs.front()) return vs.front();
  if (x >= xs.back()) return vs.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t hi = std::size_t(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return vs[lo] + t * (vs[hi] - vs[lo]);
}

void check_table(const std::vector<double>& xs, const std::vector<double>& vs) {
  if (xs.size() < 2 || xs.size() != vs.size())
    throw ValidationError("tabulated potential needs >= 2 (x, V) samples");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw ValidationError("tabulated potential abscissae must increase");
  for (double v : vs)
    if (!std::isfinite(v)) throw ValidationError("tabulated potential values must be finite");
}

}  // namespace

PotentialSpec PotentialSpec::harmonic(double mass, double omega, std::vector<double> center) {
  if (!(mass > 0.0) || !std::isfinite(omega)) throw ValidationError("harmonic: bad mass/omega");
  const double k = mass * omega * omega;
  PotentialSpec spec;
  spec.with_external(
      [k, center = std::move(center)](std::span<const double> x) {
        double r2 = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) {
          const double d = x[a] - (a < center.size() ? center[a] : 0.0);
          r2 += d * d;
        }
        return 0.5 * k * r2;
      },
      "harmonic");
  return spec;
}

PotentialSpec& PotentialSpec::with_external(ExternalPotential f, std::string label) {
  external_ = std::move(f);
  external_label_ = std::move(label);
  return *this;
}

PotentialSpec& PotentialSpec::with_pairwise(PairPotential f, std::string label) {
  pairwise_ = std::move(f);
  pairwise_label_ = std::move(label);
  return *this;
}

double PotentialSpec::particle_term(const LatticeGrid& grid, std::span<const double> x,
                                    std::size_t i) const {
  const std::size_t d = grid.dims_per_particle();
  double v = external_at(x.subspan(i * d, d));
  if (pairwise_) {
    for (std::size_t j = 0; j < grid.n_particles(); ++j) {
      if (j == i) continue;
      double r2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double L = grid.length(i * d + k);
        double delta = x[i * d + k] - x[j * d + k];
        delta -= L * std::round(delta / L);
        r2 += delta * delta;
      }
      v += 0.5 * pairwise_(std::sqrt(r2));
    }
  }
  return v;
}

std::vector<double> PotentialSpec::sample(const LatticeGrid& grid) const {
  std::vector<double> out(grid.size(), 0.0);
  if (!external_ && !pairwise_) return out;
  std::vector<double> x(grid.rank());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.coordinates(p, x);
    double v = 0.0;
    for (std::size_t i = 0; i < grid.n_particles(); ++i) v += particle_term(grid, x, i);
    if (!std::isfinite(v)) throw ValidationError("potential is not finite on the grid");
    out[p] = v;
  }
  return out;
}

std::vector<double> PotentialSpec::sample_particle(const LatticeGrid& grid,
                                                   std::size_t particle) const {
  if (particle >= grid.n_particles()) throw ValidationError("particle index out of range");
  std::vector<double> out(grid.size(), 0.0);
  std::vector<double> x(grid.rank());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.coordinates(p, x);
    out[p] = particle_term(grid, x, particle);
  }
  return out;
}

ExternalPotential tabulated_external(std::vector<double> xs, std::vector<double> vs,
                                     double period) {
  check_table(xs, vs);
  if (!(period > 0.0)) throw ValidationError("tabulated potential needs a positive period");
  // Close the table periodically so interpolation across the wrap is linear.
  xs.push_back(xs.front() + period);
  vs.push_back(vs.front());
  return [xs = std::move(xs), vs = std::move(vs), period](std::span<const double> x) {
    if (x.size() != 1) throw ValidationError("tabulated external potentials are one-dimensional");
    double q = x[0] - xs.front();
    q -= period * std::floor(q / period);
    return linear_lookup(xs, vs, xs.front() + q);
  };
}

PairPotential tabulated_radial(std::vector<double> rs, std::vector<double> vs) {
  check_table(rs, vs);
  return [rs = std::move(rs), vs = std::move(vs)](double r) { return linear_lookup(rs, vs, r); };
}

}  // namespace qhd
