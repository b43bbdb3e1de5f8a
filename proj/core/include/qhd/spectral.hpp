#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "qhd/grid.hpp"

namespace qhd {

using Complex = std::complex<double>;

namespace detail {
class FftPlan;
}

/// Fourier-collocation operators on a periodic LatticeGrid.
///
/// Odd-order derivative multipliers vanish on the Nyquist mode; the
/// same-axis second derivative keeps -k^2 there. Plans are shared between
/// instances with the same shape and executing them is thread-safe.
class SpectralOps {
 public:
  explicit SpectralOps(const LatticeGrid& grid);

  const LatticeGrid& grid() const noexcept { return grid_; }

  /// In-place unnormalised forward DFT (e^{-ikx} convention).
  void forward(std::span<Complex> data) const;
  /// In-place inverse DFT including the 1/N factor.
  void backward(std::span<Complex> data) const;

  /// Signed angular wavenumbers for one axis, FFT ordering.
  std::span<const double> wavenumbers(std::size_t axis) const { return k_[axis]; }
  /// |k|^2 summed over axes [first_axis, first_axis + n_axes).
  std::vector<double> k_squared(std::size_t first_axis, std::size_t n_axes) const;
  std::vector<double> k_squared() const { return k_squared(0, grid_.rank()); }

  std::vector<double> derivative(std::span<const double> f, std::size_t axis) const;
  std::vector<Complex> derivative(std::span<const Complex> f, std::size_t axis) const;
  /// All first derivatives from a single forward transform.
  std::vector<std::vector<double>> gradient(std::span<const double> f) const;
  std::vector<std::vector<Complex>> gradient(std::span<const Complex> f) const;
  std::vector<double> second_derivative(std::span<const double> f, std::size_t a,
                                        std::size_t b) const;
  /// Laplacian restricted to axes [first_axis, first_axis + n_axes).
  std::vector<double> laplacian(std::span<const double> f, std::size_t first_axis,
                                std::size_t n_axes) const;
  std::vector<double> laplacian(std::span<const double> f) const {
    return laplacian(f, 0, grid_.rank());
  }
  std::vector<Complex> laplacian(std::span<const Complex> f) const;

  /// Multiplier of d/dx_axis for the mode with flat index `flat`.
  double derivative_symbol(std::size_t flat, std::size_t axis) const;

 private:
  static std::vector<Complex> to_complex(std::span<const double> f);
  static std::vector<double> real_part(std::span<const Complex> f);

  LatticeGrid grid_;
  std::shared_ptr<const detail::FftPlan> plan_;
  std::vector<std::vector<double>> k_;
};

/// Fourier-collocation derivative along `axis` (exact for band-limited fields).
std::vector<double> spectral_gradient(const LatticeGrid& grid, std::span<const double> field,
                                      std::size_t axis);
std::vector<Complex> spectral_gradient(const LatticeGrid& grid, std::span<const Complex> field,
                                       std::size_t axis);

}  // namespace qhd
