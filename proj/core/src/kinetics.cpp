#include "qhd/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qhd/binary_io.hpp"
#include "qhd/error.hpp"
#include "qhd/parallel.hpp"

namespace qhd {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kInitStep = 0xFFFFFFFFFFFFFFFFULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double wrap_coordinate(double x, double length) {
  double y = x - length * std::floor((x + 0.5 * length) / length);
  if (y >= 0.5 * length) y -= length;
  return y;
}

std::size_t cell_of(std::span<const double> x, const std::vector<std::size_t>& cells,
                    const std::vector<double>& box) {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < cells.size(); ++a) {
    const double t = (x[a] + 0.5 * box[a]) / box[a];
    auto c = static_cast<long long>(std::floor(t * double(cells[a])));
    c = std::clamp<long long>(c, 0, static_cast<long long>(cells[a]) - 1);
    flat = flat * cells[a] + std::size_t(c);
  }
  return flat;
}

std::size_t product(const std::vector<std::size_t>& v) {
  std::size_t n = 1;
  for (auto x : v) n *= x;
  return n;
}

void check_cells(const MonadEnsemble& ens, const std::vector<std::size_t>& cells) {
  if (cells.size() != ens.dims) throw ValidationError("need one cell count per axis");
  for (auto c : cells)
    if (c == 0) throw ValidationError("cell counts must be >= 1");
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t step, std::uint64_t stream)
    : key_(mix64(mix64(seed + kGolden) ^ mix64(step + 2 * kGolden) ^ mix64(stream + 3 * kGolden))) {}

std::uint64_t CounterRng::next_u64() { return mix64(key_ + (++counter_) * kGolden); }

double CounterRng::uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t CounterRng::below(std::uint64_t n) {
  const auto v = static_cast<std::uint64_t>(uniform() * double(n));
  return std::min(v, n - 1);
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

void MonadEnsemble::validate() const {
  if (dims < 1 || dims > 3) throw ValidationError("monad dimension must be 1, 2 or 3");
  if (!(mu > 0.0)) throw ValidationError("monad mass must be > 0");
  if (box.size() != dims) throw ValidationError("box needs one length per axis");
  for (double l : box)
    if (!(l > 0.0) || !std::isfinite(l)) throw ValidationError("box lengths must be > 0");
  if (positions.size() % dims != 0 || positions.size() != velocities.size())
    throw ValidationError("positions and velocities must both be count x dims");
  if (count() < 2) throw ValidationError("an ensemble needs at least 2 monads");
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double half = 0.5 * box[i % dims];
    if (!(positions[i] >= -half && positions[i] < half))
      throw ValidationError("monad position outside the box");
    if (!std::isfinite(velocities[i])) throw ValidationError("monad velocity is not finite");
  }
}

std::vector<double> MonadEnsemble::total_momentum() const {
  std::vector<double> p(dims, 0.0);
  for (std::size_t i = 0; i < velocities.size(); ++i) p[i % dims] += mu * velocities[i];
  return p;
}

double MonadEnsemble::kinetic_energy() const {
  double e = 0.0;
  for (double v : velocities) e += v * v;
  return 0.5 * mu * e;
}

MonadEnsemble sample_ensemble(const EnsembleSpec& spec) {
  MonadEnsemble ens;
  ens.dims = spec.dims;
  ens.mu = spec.mu;
  ens.box = spec.box;
  ens.seed = spec.seed;
  if (spec.box.size() != spec.dims) throw ValidationError("box needs one length per axis");
  if (!(spec.temperature >= 0.0)) throw ValidationError("temperature must be >= 0");
  if (!spec.drift.empty() && spec.drift.size() != spec.dims)
    throw ValidationError("drift needs one component per axis");
  if (!spec.axis_temperatures.empty() && spec.axis_temperatures.size() != spec.dims)
    throw ValidationError("axis temperatures need one value per axis");
  if (std::abs(spec.density_amplitude) >= 1.0)
    throw ValidationError("density amplitude must be below 1 in magnitude");
  if (spec.wave_axis >= spec.dims) throw ValidationError("wave axis out of range");

  ens.positions.resize(spec.count * spec.dims);
  ens.velocities.resize(spec.count * spec.dims);
  const double amp = spec.density_amplitude;
  const double k = 2.0 * std::numbers::pi / (spec.dims ? spec.box[spec.wave_axis] : 1.0);
  parallel_for(0, spec.count, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      CounterRng rng(spec.seed, kInitStep, i);
      double* x = ens.positions.data() + i * spec.dims;
      double* v = ens.velocities.data() + i * spec.dims;
      while (true) {
        for (std::size_t a = 0; a < spec.dims; ++a)
          x[a] = wrap_coordinate((rng.uniform() - 0.5) * spec.box[a], spec.box[a]);
        if (amp == 0.0) break;
        const double accept = (1.0 + amp * std::sin(k * x[spec.wave_axis])) / (1.0 + std::abs(amp));
        if (rng.uniform() < accept) break;
      }
      for (std::size_t a = 0; a < spec.dims; ++a) {
        const double t = spec.axis_temperatures.empty() ? spec.temperature : spec.axis_temperatures[a];
        const double drift = spec.drift.empty() ? 0.0 : spec.drift[a];
        v[a] = drift + std::sqrt(t / spec.mu) * rng.normal();
      }
    }
  });
  ens.validate();
  return ens;
}

MonadPotential MonadPotential::uniform(std::vector<double> force) {
  auto f = force;
  return MonadPotential(
      [f](std::span<const double> x) {
        double v = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) v -= f.at(a) * x[a];
        return v;
      },
      [f](std::span<const double>, std::span<double> out) {
        for (std::size_t a = 0; a < out.size(); ++a) out[a] = f.at(a);
      });
}

MonadPotential MonadPotential::harmonic(double stiffness, std::vector<double> center) {
  auto c = center;
  auto at = [c](std::size_t a) { return a < c.size() ? c[a] : 0.0; };
  return MonadPotential(
      [stiffness, at](std::span<const double> x) {
        double v = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) v += (x[a] - at(a)) * (x[a] - at(a));
        return 0.5 * stiffness * v;
      },
      [stiffness, at](std::span<const double> x, std::span<double> out) {
        for (std::size_t a = 0; a < x.size(); ++a) out[a] = -stiffness * (x[a] - at(a));
      });
}

MonadPotential MonadPotential::from_external(const PotentialSpec& spec, double step) {
  if (!spec.has_external()) return zero();
  return MonadPotential(
      [spec](std::span<const double> x) { return spec.external_at(x); },
      [spec, step](std::span<const double> x, std::span<double> out) {
        std::vector<double> y(x.begin(), x.end());
        for (std::size_t a = 0; a < x.size(); ++a) {
          y[a] = x[a] + step;
          const double up = spec.external_at(y);
          y[a] = x[a] - step;
          const double down = spec.external_at(y);
          y[a] = x[a];
          out[a] = -(up - down) / (2.0 * step);
        }
      });
}

void MonadPotential::force(std::span<const double> x, std::span<double> out) const {
  if (force_)
    force_(x, out);
  else
    std::fill(out.begin(), out.end(), 0.0);
}

MonadEnsemble stream_and_force(const MonadEnsemble& ens, const MonadPotential& potential, double dt) {
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  MonadEnsemble out = ens;
  const std::size_t d = ens.dims;
  const double kick = 0.5 * dt / ens.mu;
  const bool forced = !potential.is_zero();
  parallel_for(0, ens.count(), [&](std::size_t lo, std::size_t hi) {
    double f[3];
    for (std::size_t i = lo; i < hi; ++i) {
      double* x = out.positions.data() + i * d;
      double* v = out.velocities.data() + i * d;
      if (forced) {
        potential.force({x, d}, {f, d});
        for (std::size_t a = 0; a < d; ++a) v[a] += kick * f[a];
      }
      for (std::size_t a = 0; a < d; ++a) x[a] += v[a] * dt;
      if (forced) {
        potential.force({x, d}, {f, d});
        for (std::size_t a = 0; a < d; ++a) v[a] += kick * f[a];
      }
      for (std::size_t a = 0; a < d; ++a) x[a] = wrap_coordinate(x[a], ens.box[a]);
    }
  });
  return out;
}

std::vector<std::size_t> cells_for_size(const std::vector<double>& box, double cell_size) {
  if (!(cell_size > 0.0)) throw ValidationError("cell size must be > 0");
  std::vector<std::size_t> cells;
  for (double l : box)
    cells.push_back(std::max<std::size_t>(1, std::size_t(std::floor(l / cell_size + 1e-9))));
  return cells;
}

CollisionOutcome collide(const MonadEnsemble& ens, const CollisionSettings& settings, double dt) {
  check_cells(ens, settings.cells);
  if (!(settings.rate >= 0.0) || !std::isfinite(settings.rate))
    throw ValidationError("collision rate must be >= 0");
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");

  CollisionOutcome result{ens, {}};
  auto& out = result.ensemble;
  auto& stats = result.stats;
  const std::size_t d = ens.dims;
  const std::size_t n = ens.count();
  const std::size_t n_cells = product(settings.cells);

  // Counting sort by cell; order inside a cell follows monad index.
  std::vector<std::size_t> cell(n);
  std::vector<std::size_t> start(n_cells + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    cell[i] = cell_of(ens.position(i), settings.cells, ens.box);
    ++start[cell[i] + 1];
  }
  for (std::size_t c = 0; c < n_cells; ++c) start[c + 1] += start[c];
  std::vector<std::size_t> order(n);
  {
    auto fill = start;
    for (std::size_t i = 0; i < n; ++i) order[fill[cell[i]]++] = i;
  }

  struct CellStats {
    std::size_t candidates = 0;
    std::size_t accepted = 0;
    double dp = 0.0;
    double de = 0.0;
  };
  std::vector<CellStats> per_cell(n_cells);

  parallel_for(
      0, n_cells,
      [&](std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c) {
          const std::size_t nc = start[c + 1] - start[c];
          if (nc < 2 || settings.rate == 0.0) continue;
          const std::size_t* members = order.data() + start[c];
          CounterRng rng(ens.seed, ens.step, c);
          const double expected = 0.5 * settings.rate * dt * double(nc);
          std::size_t candidates = std::size_t(std::floor(expected));
          if (rng.uniform() < expected - std::floor(expected)) ++candidates;

          double mean[3] = {0.0, 0.0, 0.0};
          for (std::size_t m = 0; m < nc; ++m)
            for (std::size_t a = 0; a < d; ++a) mean[a] += out.velocities[members[m] * d + a];
          for (std::size_t a = 0; a < d; ++a) mean[a] /= double(nc);
          double spread = 0.0;
          for (std::size_t m = 0; m < nc; ++m) {
            double s = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
              const double dv = out.velocities[members[m] * d + a] - mean[a];
              s += dv * dv;
            }
            spread = std::max(spread, s);
          }
          const double g_max = 2.0 * std::sqrt(spread);
          auto& cs = per_cell[c];
          cs.candidates = candidates;
          if (g_max == 0.0) continue;

          for (std::size_t t = 0; t < candidates; ++t) {
            const std::size_t a_idx = rng.below(nc);
            std::size_t b_idx = rng.below(nc - 1);
            if (b_idx >= a_idx) ++b_idx;
            double* vi = out.velocities.data() + members[a_idx] * d;
            double* vj = out.velocities.data() + members[b_idx] * d;
            double g[3];
            double g2 = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
              g[a] = vi[a] - vj[a];
              g2 += g[a] * g[a];
            }
            const double speed = std::sqrt(g2);
            if (rng.uniform() * g_max >= speed) continue;

            double p_before[3];
            double e_before = 0.0;
            double p_scale = 0.0;
            double ni = 0.0;
            double nj = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
              p_before[a] = vi[a] + vj[a];
              ni += vi[a] * vi[a];
              nj += vj[a] * vj[a];
            }
            e_before = ni + nj;
            p_scale = std::sqrt(ni) + std::sqrt(nj);

            if (d == 1) {
              std::swap(vi[0], vj[0]);
            } else {
              double dir[3];
              if (d == 2) {
                const double phi = 2.0 * std::numbers::pi * rng.uniform();
                dir[0] = std::cos(phi);
                dir[1] = std::sin(phi);
              } else {
                const double cos_t = 2.0 * rng.uniform() - 1.0;
                const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
                const double phi = 2.0 * std::numbers::pi * rng.uniform();
                dir[0] = sin_t * std::cos(phi);
                dir[1] = sin_t * std::sin(phi);
                dir[2] = cos_t;
              }
              for (std::size_t a = 0; a < d; ++a) {
                const double center = 0.5 * (vi[a] + vj[a]);
                vi[a] = center + 0.5 * speed * dir[a];
                vj[a] = center - 0.5 * speed * dir[a];
              }
            }

            double dp2 = 0.0;
            double e_after = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
              const double diff = vi[a] + vj[a] - p_before[a];
              dp2 += diff * diff;
              e_after += vi[a] * vi[a] + vj[a] * vj[a];
            }
            if (p_scale > 0.0) cs.dp = std::max(cs.dp, std::sqrt(dp2) / p_scale);
            if (e_before > 0.0) cs.de = std::max(cs.de, std::abs(e_after - e_before) / e_before);
            ++cs.accepted;
          }
        }
      },
      1);

  for (const auto& cs : per_cell) {
    stats.candidates += cs.candidates;
    stats.accepted += cs.accepted;
    stats.max_event_momentum_error = std::max(stats.max_event_momentum_error, cs.dp);
    stats.max_event_energy_error = std::max(stats.max_event_energy_error, cs.de);
  }
  const auto p0 = ens.total_momentum();
  const auto p1 = out.total_momentum();
  stats.delta_momentum.resize(d);
  for (std::size_t a = 0; a < d; ++a) stats.delta_momentum[a] = p1[a] - p0[a];
  stats.delta_energy = out.kinetic_energy() - ens.kinetic_energy();
  stats.delta_count = static_cast<long long>(out.count()) - static_cast<long long>(ens.count());
  return result;
}

CollisionOutcome advance(const MonadEnsemble& ens, const MonadPotential& potential,
                         const CollisionSettings& settings, double dt) {
  auto result = collide(stream_and_force(ens, potential, dt), settings, dt);
  ++result.ensemble.step;
  return result;
}

std::size_t MomentFields::cell_count() const { return product(cells); }

double MomentFields::cell_volume() const {
  double v = 1.0;
  for (std::size_t a = 0; a < cells.size(); ++a) v *= box[a] / double(cells[a]);
  return v;
}

std::vector<double> MomentFields::cell_center(std::size_t cell) const {
  std::vector<double> x(cells.size());
  for (std::size_t a = cells.size(); a-- > 0;) {
    const std::size_t c = cell % cells[a];
    cell /= cells[a];
    x[a] = -0.5 * box[a] + (double(c) + 0.5) * box[a] / double(cells[a]);
  }
  return x;
}

MomentFields project_moments(const MonadEnsemble& ens, const std::vector<std::size_t>& cells,
                             const MonadPotential& potential, std::size_t min_count,
                             const std::function<bool(std::size_t)>& select, double weight) {
  check_cells(ens, cells);
  const std::size_t d = ens.dims;
  MomentFields m;
  m.dims = d;
  m.mu = ens.mu;
  m.cells = cells;
  m.box = ens.box;
  const std::size_t nc = m.cell_count();
  m.count.assign(nc, 0);
  m.masked.assign(nc, 0);
  m.density.assign(nc, 0.0);
  m.velocity.assign(nc * d, 0.0);
  m.stress.assign(nc * d * d, 0.0);
  m.heat_flux.assign(nc * d, 0.0);
  m.internal_energy.assign(nc, 0.0);
  m.energy.assign(nc, 0.0);
  m.energy_flux.assign(nc * d, 0.0);
  m.force.assign(nc * d, 0.0);

  const std::size_t n = ens.count();
  std::vector<std::size_t> cell(n);
  const bool forced = !potential.is_zero();
  double f[3];
  for (std::size_t i = 0; i < n; ++i) {
    if (select && !select(i)) continue;
    cell[i] = cell_of(ens.position(i), cells, ens.box);
    const std::size_t c = cell[i];
    ++m.count[c];
    for (std::size_t a = 0; a < d; ++a) m.velocity[c * d + a] += ens.velocities[i * d + a];
    if (forced) {
      potential.force(ens.position(i), {f, d});
      for (std::size_t a = 0; a < d; ++a) m.force[c * d + a] += f[a];
    }
  }
  for (std::size_t c = 0; c < nc; ++c) {
    if (m.count[c] == 0) continue;
    for (std::size_t a = 0; a < d; ++a) {
      m.velocity[c * d + a] /= double(m.count[c]);
      m.force[c * d + a] /= double(m.count[c]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (select && !select(i)) continue;
    const std::size_t c = cell[i];
    double dv[3];
    double dv2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      dv[a] = ens.velocities[i * d + a] - m.velocity[c * d + a];
      dv2 += dv[a] * dv[a];
    }
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) m.stress[(c * d + a) * d + b] += dv[a] * dv[b];
      m.heat_flux[c * d + a] += dv2 * dv[a];
    }
  }
  const double vol = m.cell_volume();
  for (std::size_t c = 0; c < nc; ++c) {
    if (m.count[c] < std::max<std::size_t>(min_count, 1)) {
      m.masked[c] = 1;
      std::fill_n(m.velocity.begin() + long(c * d), d, 0.0);
      std::fill_n(m.force.begin() + long(c * d), d, 0.0);
      std::fill_n(m.stress.begin() + long(c * d * d), d * d, 0.0);
      std::fill_n(m.heat_flux.begin() + long(c * d), d, 0.0);
      continue;
    }
    const double inv = 1.0 / double(m.count[c]);
    m.density[c] = weight * double(m.count[c]) / vol;
    double trace = 0.0;
    double u2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) m.stress[(c * d + a) * d + b] *= ens.mu * inv;
      m.heat_flux[c * d + a] *= 0.5 * ens.mu * inv;
      trace += m.stress[(c * d + a) * d + a];
      u2 += m.velocity[c * d + a] * m.velocity[c * d + a];
    }
    m.internal_energy[c] = 0.5 * trace;
    m.energy[c] = 0.5 * ens.mu * u2 + m.internal_energy[c] + potential.value(m.cell_center(c));
    for (std::size_t a = 0; a < d; ++a) {
      double s = m.energy[c] * m.velocity[c * d + a] + m.heat_flux[c * d + a];
      for (std::size_t b = 0; b < d; ++b) s += m.stress[(c * d + a) * d + b] * m.velocity[c * d + b];
      m.energy_flux[c * d + a] = s;
    }
  }
  return m;
}

SplitMoments project_split(const MonadEnsemble& ens, const std::vector<std::size_t>& cells,
                           const MonadPotential& potential, std::size_t min_count) {
  return {project_moments(ens, cells, potential, min_count),
          project_moments(ens, cells, potential, min_count,
                          [](std::size_t i) { return i % 2 == 0; }, 2.0),
          project_moments(ens, cells, potential, min_count,
                          [](std::size_t i) { return i % 2 == 1; }, 2.0)};
}

namespace {

// Fourier-collocation derivative along one axis of a (small) cell grid.
std::vector<double> cell_derivative(std::span<const double> f, const std::vector<std::size_t>& cells,
                                    const std::vector<double>& box, std::size_t axis) {
  const std::size_t n = cells[axis];
  std::vector<double> out(f.size(), 0.0);
  if (n < 3) return out;
  std::size_t stride = 1;
  for (std::size_t a = axis + 1; a < cells.size(); ++a) stride *= cells[a];
  const std::size_t total = f.size();
  std::vector<std::complex<double>> coef(n);
  for (std::size_t base = 0; base < total; ++base) {
    if ((base / stride) % n != 0) continue;
    for (std::size_t m = 0; m < n; ++m) {
      std::complex<double> s = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        s += f[base + j * stride] *
             std::polar(1.0, -2.0 * std::numbers::pi * double(m * j % n) / double(n));
      const long signed_m = m <= n / 2 ? long(m) : long(m) - long(n);
      const bool nyquist = n % 2 == 0 && m == n / 2;
      const double k = nyquist ? 0.0 : 2.0 * std::numbers::pi * double(signed_m) / box[axis];
      coef[m] = std::complex<double>(0.0, k) * s;
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::complex<double> s = 0.0;
      for (std::size_t m = 0; m < n; ++m)
        s += coef[m] * std::polar(1.0, 2.0 * std::numbers::pi * double(m * j % n) / double(n));
      out[base + j * stride] = s.real() / double(n);
    }
  }
  return out;
}

struct Balance {
  std::vector<double> rate;  // time-derivative term
  std::vector<double> flux;  // divergence and source terms
};

// One balance law per equation: continuity, momentum per axis, energy.
std::vector<Balance> balances(const MomentFields& prev, const MomentFields& cur,
                              const MomentFields& next, double dt, double mu) {
  const std::size_t d = cur.dims;
  const std::size_t nc = cur.cell_count();
  std::vector<Balance> out(d + 2, Balance{std::vector<double>(nc, 0.0), std::vector<double>(nc, 0.0)});
  auto add_div = [&](std::vector<double>& target, const std::function<double(std::size_t, std::size_t)>& comp) {
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<double> g(nc);
      for (std::size_t c = 0; c < nc; ++c) g[c] = comp(c, j);
      const auto dg = cell_derivative(g, cur.cells, cur.box, j);
      for (std::size_t c = 0; c < nc; ++c) target[c] += dg[c];
    }
  };
  for (std::size_t c = 0; c < nc; ++c)
    out[0].rate[c] = (next.density[c] - prev.density[c]) / (2.0 * dt);
  add_div(out[0].flux, [&](std::size_t c, std::size_t j) { return cur.density[c] * cur.velocity[c * d + j]; });

  for (std::size_t i = 0; i < d; ++i) {
    auto& b = out[1 + i];
    for (std::size_t c = 0; c < nc; ++c) {
      b.rate[c] = mu *
                  (next.density[c] * next.velocity[c * d + i] - prev.density[c] * prev.velocity[c * d + i]) /
                  (2.0 * dt);
      b.flux[c] = -cur.density[c] * cur.force[c * d + i];
    }
    add_div(b.flux, [&](std::size_t c, std::size_t j) {
      return cur.density[c] * (mu * cur.velocity[c * d + i] * cur.velocity[c * d + j] +
                               cur.stress[(c * d + i) * d + j]);
    });
  }

  auto& e = out[d + 1];
  for (std::size_t c = 0; c < nc; ++c)
    e.rate[c] = (next.density[c] * next.energy[c] - prev.density[c] * prev.energy[c]) / (2.0 * dt);
  add_div(e.flux, [&](std::size_t c, std::size_t j) { return cur.density[c] * cur.energy_flux[c * d + j]; });
  return out;
}

}  // namespace

MomentResiduals moment_residuals(const std::vector<SplitMoments>& series, double dt) {
  if (series.size() < 3) throw SeriesTooShort("need at least 3 moment snapshots");
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  const auto& first = series.front().full;
  const std::size_t d = first.dims;
  const std::size_t nc = first.cell_count();
  for (const auto& s : series)
    if (s.full.cells != first.cells || s.half_a.cells != first.cells || s.half_b.cells != first.cells)
      throw ValidationError("moment series must share one cell grid");

  const std::size_t n_eq = d + 2;
  std::vector<double> sum_full(n_eq, 0.0), sum_diff(n_eq, 0.0), sum_rate(n_eq, 0.0),
      sum_flux(n_eq, 0.0);
  const double vol = first.cell_volume();
  MomentResiduals out;
  for (std::size_t k = 1; k + 1 < series.size(); ++k) {
    const auto full = balances(series[k - 1].full, series[k].full, series[k + 1].full, dt, first.mu);
    const auto half_a =
        balances(series[k - 1].half_a, series[k].half_a, series[k + 1].half_a, dt, first.mu);
    const auto half_b =
        balances(series[k - 1].half_b, series[k].half_b, series[k + 1].half_b, dt, first.mu);
    for (std::size_t c = 0; c < nc; ++c) {
      bool skip = false;
      for (std::size_t j = k - 1; j <= k + 1; ++j)
        skip = skip || series[j].full.masked[c] || series[j].half_a.masked[c] ||
               series[j].half_b.masked[c];
      if (skip) continue;
      for (std::size_t e = 0; e < n_eq; ++e) {
        const double r = full[e].rate[c] + full[e].flux[c];
        const double ra = half_a[e].rate[c] + half_a[e].flux[c];
        const double rb = half_b[e].rate[c] + half_b[e].flux[c];
        sum_full[e] += r * r * vol;
        sum_diff[e] += (ra - rb) * (ra - rb) * vol;
        sum_rate[e] += full[e].rate[c] * full[e].rate[c] * vol;
        sum_flux[e] += full[e].flux[c] * full[e].flux[c] * vol;
      }
    }
    ++out.intervals;
  }
  auto norm = [&](std::size_t e) {
    const double k = double(out.intervals);
    ResidualNorm r;
    r.l2 = std::sqrt(sum_full[e] / k);
    r.noise_floor = 0.5 * std::sqrt(sum_diff[e] / k);
    r.scale = std::sqrt(std::max(sum_rate[e], sum_flux[e]) / k);
    return r;
  };
  out.continuity = norm(0);
  for (std::size_t i = 0; i < d; ++i) out.momentum.push_back(norm(1 + i));
  out.energy = norm(d + 1);
  return out;
}

void write_ensemble(std::ostream& out, const MonadEnsemble& ens) {
  out << "magic MON1\n";
  out << "count " << ens.count() << '\n';
  out << "dims " << ens.dims << '\n';
  out << "mu " << io::format_double(ens.mu) << '\n';
  out << "box";
  for (double l : ens.box) out << ' ' << io::format_double(l);
  out << "\nseed " << ens.seed << '\n';
  out << "step " << ens.step << '\n';
  io::write_f64_le(out, ens.positions);
  io::write_f64_le(out, ens.velocities);
}

namespace {

std::istringstream mon_line(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("MON1: missing '" + key + "' line");
  std::istringstream ls(line);
  std::string word;
  ls >> word;
  if (word != key) throw FormatError("MON1: expected '" + key + "', found '" + word + "'");
  return ls;
}

}  // namespace

MonadEnsemble read_ensemble(std::istream& in) {
  MonadEnsemble ens;
  std::string magic;
  mon_line(in, "magic") >> magic;
  if (magic != "MON1") throw FormatError("MON1: bad magic '" + magic + "'");
  std::size_t count = 0;
  if (!(mon_line(in, "count") >> count)) throw FormatError("MON1: bad count");
  if (!(mon_line(in, "dims") >> ens.dims) || ens.dims < 1 || ens.dims > 3)
    throw FormatError("MON1: bad dims");
  if (!(mon_line(in, "mu") >> ens.mu)) throw FormatError("MON1: bad mu");
  auto box = mon_line(in, "box");
  ens.box.resize(ens.dims);
  for (auto& l : ens.box)
    if (!(box >> l)) throw FormatError("MON1: short box line");
  if (!(mon_line(in, "seed") >> ens.seed)) throw FormatError("MON1: bad seed");
  if (!(mon_line(in, "step") >> ens.step)) throw FormatError("MON1: bad step");
  ens.positions.resize(count * ens.dims);
  ens.velocities.resize(count * ens.dims);
  io::read_f64_le(in, ens.positions);
  io::read_f64_le(in, ens.velocities);
  ens.validate();
  return ens;
}

void save_ensemble(const std::filesystem::path& path, const MonadEnsemble& ens) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_ensemble(out, ens);
}

MonadEnsemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_ensemble(in);
}

}  // namespace qhd
