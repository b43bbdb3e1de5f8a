#include "qhd/madelung.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qhd/error.hpp"

namespace qhd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// A wrapped increment this close to pi between two resolved points is a
// sign flip of the field, i.e. a node between grid points.
constexpr double kAmbiguousJump = std::numbers::pi * (1.0 - 1e-6);

double sum_abs2(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

}  // namespace

double rho_floor(std::span<const double> rho) {
  double mx = 0.0;
  for (double r : rho) mx = std::max(mx, r);
  return kRhoFloorFraction * mx;
}

double wrap_symmetric(double value, double period) {
  return value - period * std::ceil(value / period - 0.5);
}

WaveField::WaveField(LatticeGrid grid, std::vector<Complex> values, double hbar, double mass)
    : grid_(std::move(grid)), values_(std::move(values)), hbar_(hbar), mass_(mass) {
  if (values_.size() != grid_.size()) throw ValidationError("WaveField: size does not match grid");
  if (!(hbar_ > 0.0) || !(mass_ > 0.0)) throw ValidationError("WaveField: hbar and mass must be > 0");
  for (const auto& z : values_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw NonFinite("WaveField: non-finite amplitude");
  const double n = norm();
  if (std::abs(n - 1.0) > kNormTolerance)
    throw ValidationError("WaveField: norm " + std::to_string(n) + " is not 1");
}

WaveField WaveField::normalized(LatticeGrid grid, std::vector<Complex> values, double hbar,
                                double mass) {
  const double n2 = sum_abs2(values) * grid.cell_volume();
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw ValidationError("WaveField: cannot normalise");
  const double scale = 1.0 / std::sqrt(n2);
  for (auto& z : values) z *= scale;
  return WaveField(std::move(grid), std::move(values), hbar, mass);
}

double WaveField::norm() const { return sum_abs2(values_) * grid_.cell_volume(); }

std::vector<double> WaveField::density() const {
  std::vector<double> rho(values_.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(values_[i]);
  return rho;
}

MadelungPair::MadelungPair(LatticeGrid grid, std::vector<double> rho, std::vector<double> phase,
                           double hbar, std::vector<std::uint8_t> flagged)
    : grid_(std::move(grid)),
      rho_(std::move(rho)),
      phase_(std::move(phase)),
      flagged_(std::move(flagged)),
      hbar_(hbar) {
  if (rho_.size() != grid_.size() || phase_.size() != grid_.size())
    throw ValidationError("MadelungPair: field sizes do not match grid");
  if (flagged_.empty()) flagged_.assign(grid_.size(), 0);
  if (flagged_.size() != grid_.size()) throw ValidationError("MadelungPair: flag size mismatch");
  if (!(hbar_ > 0.0)) throw ValidationError("MadelungPair: hbar must be > 0");
  for (std::size_t i = 0; i < rho_.size(); ++i) {
    if (!std::isfinite(rho_[i]) || !std::isfinite(phase_[i]))
      throw NonFinite("MadelungPair: non-finite value");
    if (rho_[i] < 0.0) throw ValidationError("MadelungPair: negative density");
  }
  const double m = mass_integral();
  if (std::abs(m - 1.0) > kNormTolerance)
    throw ValidationError("MadelungPair: density integrates to " + std::to_string(m));
}

std::size_t MadelungPair::flagged_count() const {
  return std::size_t(std::count(flagged_.begin(), flagged_.end(), std::uint8_t{1}));
}

double MadelungPair::mass_integral() const { return integrate(grid_, rho_); }

namespace {

// Replaces the phase at sub-floor points by linear interpolation between the
// nearest resolved points on each grid line (last axis first). Across the
// torus seam the interpolation follows the shortest angular difference, so
// the filled line has no jump besides a whole winding.
void fill_flagged(const LatticeGrid& grid, std::span<const std::uint8_t> flagged,
                  std::vector<double>& angle) {
  const std::size_t n = grid.size();
  std::vector<std::uint8_t> known(n);
  for (std::size_t p = 0; p < n; ++p) known[p] = flagged[p] ? 0 : 1;
  std::vector<std::size_t> resolved;
  for (std::size_t a = grid.rank(); a-- > 0;) {
    const std::size_t len = grid.points(a);
    const std::size_t stride = grid.stride(a);
    std::vector<std::uint8_t> next = known;
    for (std::size_t base = 0; base < n; ++base) {
      if (grid.index_along(base, a) != 0) continue;
      resolved.clear();
      for (std::size_t j = 0; j < len; ++j)
        if (known[base + j * stride]) resolved.push_back(j);
      if (resolved.empty() || resolved.size() == len) continue;
      auto at = [&](std::size_t j) -> double& { return angle[base + j * stride]; };
      for (std::size_t r = 0; r + 1 < resolved.size(); ++r) {
        const std::size_t lo = resolved[r];
        const std::size_t hi = resolved[r + 1];
        for (std::size_t j = lo + 1; j < hi; ++j)
          at(j) = at(lo) + (at(hi) - at(lo)) * double(j - lo) / double(hi - lo);
      }
      const std::size_t last = resolved.back();
      const std::size_t first = resolved.front();
      const std::size_t gap = len - last + first;
      const double slope = wrap_symmetric(at(first) - at(last), kTwoPi) / double(gap);
      for (std::size_t j = last + 1; j < len; ++j) at(j) = at(last) + slope * double(j - last);
      for (std::size_t j = 0; j < first; ++j) at(j) = at(first) - slope * double(first - j);
      for (std::size_t j = 0; j < len; ++j) next[base + j * stride] = 1;
    }
    known = std::move(next);
  }
}

}  // namespace

MadelungPair to_madelung(const WaveField& psi, PhaseUnwrapPolicy policy) {
  const auto& grid = psi.grid();
  const auto values = psi.values();
  const std::size_t n = grid.size();
  std::vector<double> rho = psi.density();
  const double floor = rho_floor(rho);
  std::vector<std::uint8_t> flagged(n, 0);
  std::vector<double> raw(n);
  for (std::size_t p = 0; p < n; ++p) {
    raw[p] = std::arg(values[p]);
    flagged[p] = rho[p] < floor ? 1 : 0;
  }

  std::vector<double> angle(n);
  if (policy == PhaseUnwrapPolicy::none) {
    angle = raw;
  } else {
    angle[0] = raw[0];
    const std::size_t rank = grid.rank();
    for (std::size_t a = 0; a < rank; ++a) {
      const std::size_t stride = grid.stride(a);
      for (std::size_t p = 0; p < n; ++p) {
        bool on_sweep = grid.index_along(p, a) >= 1;
        for (std::size_t b = a + 1; b < rank && on_sweep; ++b)
          on_sweep = grid.index_along(p, b) == 0;
        if (!on_sweep) continue;
        const std::size_t pred = p - stride;
        if (flagged[p]) {
          angle[p] = angle[pred];
          continue;
        }
        const double step = wrap_symmetric(raw[p] - angle[pred], kTwoPi);
        if (!flagged[pred] && std::abs(step) > kAmbiguousJump)
          throw UnwrapAmbiguous("to_madelung: phase jump of pi between resolved points at index " +
                                std::to_string(p) + " (node crossing)");
        angle[p] = angle[pred] + step;
      }
    }
    fill_flagged(grid, flagged, angle);
  }

  std::vector<double> phase(n);
  for (std::size_t p = 0; p < n; ++p) phase[p] = psi.hbar() * angle[p];
  // Renormalise away rounding so the pair invariant holds exactly.
  const double total = integrate(grid, rho);
  for (auto& r : rho) r /= total;
  return MadelungPair(grid, std::move(rho), std::move(phase), psi.hbar(), std::move(flagged));
}

WaveField to_wavefield(const MadelungPair& pair, double mass) {
  const auto rho = pair.rho();
  const auto phase = pair.phase();
  std::vector<Complex> values(rho.size());
  for (std::size_t p = 0; p < rho.size(); ++p)
    values[p] = std::polar(std::sqrt(rho[p]), phase[p] / pair.hbar());
  return WaveField::normalized(pair.grid(), std::move(values), pair.hbar(), mass);
}

std::vector<double> phase_gradient(const SpectralOps& ops, std::span<const double> phase,
                                   std::size_t axis, double hbar) {
  const auto& grid = ops.grid();
  const std::size_t n = grid.size();
  const std::size_t len = grid.points(axis);
  const std::size_t stride = grid.stride(axis);
  const double period = kTwoPi * hbar;

  // Per-line winding; lines are identified by their index-0 point.
  std::vector<double> winding(n, 0.0);
  bool any = false;
  for (std::size_t p = 0; p < n; ++p) {
    if (grid.index_along(p, axis) != 0) continue;
    const double first = phase[p];
    const double last = phase[p + (len - 1) * stride];
    const double closing = wrap_symmetric(first - last, period);
    double theta = (last - first) + closing;
    theta = period * std::round(theta / period);
    if (theta != 0.0) {
      any = true;
      for (std::size_t j = 0; j < len; ++j) winding[p + j * stride] = theta;
    }
  }
  if (!any) return ops.derivative(phase, axis);

  std::vector<double> periodic(phase.begin(), phase.end());
  for (std::size_t p = 0; p < n; ++p)
    periodic[p] -= winding[p] * double(grid.index_along(p, axis)) / double(len);
  auto grad = ops.derivative(periodic, axis);
  for (std::size_t p = 0; p < n; ++p) grad[p] += winding[p] / grid.length(axis);
  return grad;
}

}  // namespace qhd
