#include "qhd/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace qhd {

namespace detail {

// FFTW planning is not thread-safe; execution of an existing plan through the
// new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlan {
 public:
  explicit FftPlan(const std::vector<std::size_t>& shape) {
    std::vector<int> n(shape.begin(), shape.end());
    std::size_t total = 1;
    for (auto s : shape) total *= s;
    size_ = total;
    std::lock_guard lock(planner_mutex());
    auto* buf = fftw_alloc_complex(total);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft(int(n.size()), n.data(), buf, buf, FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft(int(n.size()), n.data(), buf, buf, FFTW_BACKWARD, flags);
    fftw_free(buf);
  }
  ~FftPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void forward(Complex* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(fwd_, p, p);
  }
  void backward(Complex* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(bwd_, p, p);
  }
  std::size_t size() const noexcept { return size_; }

 private:
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
  std::size_t size_ = 0;
};

std::shared_ptr<const FftPlan> plan_for(const std::vector<std::size_t>& shape) {
  static std::mutex cache_mutex;
  static std::map<std::vector<std::size_t>, std::shared_ptr<const FftPlan>> cache;
  std::lock_guard lock(cache_mutex);
  auto it = cache.find(shape);
  if (it != cache.end()) return it->second;
  auto plan = std::make_shared<const FftPlan>(shape);
  cache.emplace(shape, plan);
  return plan;
}

}  // namespace detail

SpectralOps::SpectralOps(const LatticeGrid& grid)
    : grid_(grid), plan_(detail::plan_for(grid.shape())) {
  k_.resize(grid_.rank());
  for (std::size_t a = 0; a < grid_.rank(); ++a) {
    const std::size_t n = grid_.points(a);
    const double dk = 2.0 * std::numbers::pi / grid_.length(a);
    k_[a].resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const long signed_index = j <= n / 2 ? long(j) : long(j) - long(n);
      k_[a][j] = dk * double(signed_index);
    }
  }
}

void SpectralOps::forward(std::span<Complex> data) const { plan_->forward(data.data()); }

void SpectralOps::backward(std::span<Complex> data) const {
  plan_->backward(data.data());
  const double scale = 1.0 / double(data.size());
  for (auto& v : data) v *= scale;
}

std::vector<double> SpectralOps::k_squared(std::size_t first_axis, std::size_t n_axes) const {
  std::vector<double> out(grid_.size(), 0.0);
  for (std::size_t p = 0; p < out.size(); ++p) {
    double s = 0.0;
    for (std::size_t a = first_axis; a < first_axis + n_axes; ++a) {
      const double k = k_[a][grid_.index_along(p, a)];
      s += k * k;
    }
    out[p] = s;
  }
  return out;
}

double SpectralOps::derivative_symbol(std::size_t flat, std::size_t axis) const {
  const std::size_t j = grid_.index_along(flat, axis);
  if (j == grid_.points(axis) / 2) return 0.0;
  return k_[axis][j];
}

std::vector<Complex> SpectralOps::to_complex(std::span<const double> f) {
  return std::vector<Complex>(f.begin(), f.end());
}

std::vector<double> SpectralOps::real_part(std::span<const Complex> f) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

std::vector<Complex> SpectralOps::derivative(std::span<const Complex> f, std::size_t axis) const {
  std::vector<Complex> work(f.begin(), f.end());
  forward(work);
  for (std::size_t p = 0; p < work.size(); ++p)
    work[p] *= Complex(0.0, derivative_symbol(p, axis));
  backward(work);
  return work;
}

std::vector<double> SpectralOps::derivative(std::span<const double> f, std::size_t axis) const {
  return real_part(derivative(std::span<const Complex>(to_complex(f)), axis));
}

std::vector<std::vector<Complex>> SpectralOps::gradient(std::span<const Complex> f) const {
  std::vector<Complex> spectrum(f.begin(), f.end());
  forward(spectrum);
  std::vector<std::vector<Complex>> out(grid_.rank());
  for (std::size_t a = 0; a < grid_.rank(); ++a) {
    auto& w = out[a];
    w = spectrum;
    for (std::size_t p = 0; p < w.size(); ++p) w[p] *= Complex(0.0, derivative_symbol(p, a));
    backward(w);
  }
  return out;
}

std::vector<std::vector<double>> SpectralOps::gradient(std::span<const double> f) const {
  auto c = gradient(std::span<const Complex>(to_complex(f)));
  std::vector<std::vector<double>> out;
  out.reserve(c.size());
  for (auto& g : c) out.push_back(real_part(g));
  return out;
}

std::vector<double> SpectralOps::second_derivative(std::span<const double> f, std::size_t a,
                                                   std::size_t b) const {
  auto work = to_complex(f);
  forward(work);
  for (std::size_t p = 0; p < work.size(); ++p) {
    double symbol;
    if (a == b) {
      const double k = k_[a][grid_.index_along(p, a)];
      symbol = -k * k;
    } else {
      symbol = -derivative_symbol(p, a) * derivative_symbol(p, b);
    }
    work[p] *= symbol;
  }
  backward(work);
  return real_part(work);
}

std::vector<double> SpectralOps::laplacian(std::span<const double> f, std::size_t first_axis,
                                           std::size_t n_axes) const {
  auto work = to_complex(f);
  forward(work);
  const auto k2 = k_squared(first_axis, n_axes);
  for (std::size_t p = 0; p < work.size(); ++p) work[p] *= -k2[p];
  backward(work);
  return real_part(work);
}

std::vector<Complex> SpectralOps::laplacian(std::span<const Complex> f) const {
  std::vector<Complex> work(f.begin(), f.end());
  forward(work);
  const auto k2 = k_squared();
  for (std::size_t p = 0; p < work.size(); ++p) work[p] *= -k2[p];
  backward(work);
  return work;
}

std::vector<double> spectral_gradient(const LatticeGrid& grid, std::span<const double> field,
                                      std::size_t axis) {
  return SpectralOps(grid).derivative(field, axis);
}

std::vector<Complex> spectral_gradient(const LatticeGrid& grid, std::span<const Complex> field,
                                       std::size_t axis) {
  return SpectralOps(grid).derivative(field, axis);
}

}  // namespace qhd
