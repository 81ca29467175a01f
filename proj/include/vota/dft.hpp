#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "vota/error.hpp"

namespace vota::dft {

using Complex = std::complex<double>;
using ComplexVec = std::vector<Complex>;

/// Unscaled forward DFT, O(N^2). Reference for the fast path.
inline ComplexVec dft_naive(std::span<const Complex> x) {
  const std::size_t n = x.size();
  ComplexVec w(n), out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    w[j] = {std::cos(a), std::sin(a)};
  }
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc{0.0, 0.0};
    std::size_t idx = 0;  // k*m mod n
    for (std::size_t m = 0; m < n; ++m) {
      acc += x[m] * w[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    out[k] = acc;
  }
  return out;
}

/// True iff n = 2^a * 3^b with n >= 1.
constexpr bool is_smooth_23(std::size_t n) noexcept {
  if (n == 0) return false;
  while (n % 2 == 0) n /= 2;
  while (n % 3 == 0) n /= 3;
  return n == 1;
}

/// Mixed radix-2/3 decimation-in-time plan for one size. Immutable after
/// construction; execute() may be called concurrently on distinct buffers.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    if (!is_smooth_23(n))
      throw Error(Errc::UnsupportedSize, "size " + std::to_string(n) + " is not of the form 2^a*3^b");
    for (std::size_t m = n; m > 1;) {
      const std::size_t r = (m % 3 == 0) ? 3 : 2;
      radices_.push_back(r);
      m /= r;
    }
    twiddles_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double a = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
      twiddles_[j] = {std::cos(a), std::sin(a)};
    }
  }

  std::size_t size() const noexcept { return n_; }

  /// Unscaled forward transform of `in` into `out` (distinct buffers).
  void execute(std::span<const Complex> in, std::span<Complex> out) const {
    if (in.size() != n_ || out.size() != n_)
      throw Error(Errc::UnsupportedSize, "buffer size does not match plan size " + std::to_string(n_));
    recurse(in.data(), 1, out.data(), n_, 0);
  }

 private:
  void recurse(const Complex* in, std::size_t stride, Complex* out, std::size_t n, std::size_t level) const {
    if (n == 1) {
      out[0] = in[0];
      return;
    }
    const std::size_t r = radices_[level];
    const std::size_t m = n / r;
    for (std::size_t q = 0; q < r; ++q) recurse(in + q * stride, stride * r, out + q * m, m, level + 1);

    const std::size_t step = n_ / n;  // W_n^j == W_N^(j*step)
    if (r == 2) {
      for (std::size_t k = 0; k < m; ++k) {
        const Complex a = out[k];
        const Complex b = out[k + m] * twiddles_[k * step];
        out[k] = a + b;
        out[k + m] = a - b;
      }
    } else {
      // exp(-2*pi*i/3) = -1/2 - i*sqrt(3)/2
      const Complex w1{-0.5, -std::numbers::sqrt3 / 2.0};
      const Complex w2 = std::conj(w1);
      for (std::size_t k = 0; k < m; ++k) {
        const Complex a = out[k];
        const Complex b = out[k + m] * twiddles_[k * step];
        const Complex c = out[k + 2 * m] * twiddles_[(2 * k * step) % n_];
        out[k] = a + b + c;
        out[k + m] = a + w1 * b + w2 * c;
        out[k + 2 * m] = a + w2 * b + w1 * c;
      }
    }
  }

  std::size_t n_;
  std::vector<std::size_t> radices_;
  ComplexVec twiddles_;
};

/// Shared plan cache; plans are created once per size and never freed.
inline const FftPlan& plan_for(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) {
    try {
      slot = std::make_unique<FftPlan>(n);
    } catch (...) {
      cache.erase(n);
      throw;
    }
  }
  return *slot;
}

/// Unscaled forward transform, X[k] = sum_n x[n] exp(-2*pi*i*k*n/N).
inline ComplexVec fft(std::span<const Complex> x) {
  ComplexVec out(x.size());
  plan_for(x.size()).execute(x, out);
  return out;
}

/// Inverse transform with 1/N scaling.
inline ComplexVec idft(std::span<const Complex> X) {
  const std::size_t n = X.size();
  ComplexVec conj_in(n);
  for (std::size_t k = 0; k < n; ++k) conj_in[k] = std::conj(X[k]);
  ComplexVec out(n);
  plan_for(n).execute(conj_in, out);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : out) v = std::conj(v) * scale;
  return out;
}

/// Smallest power of two holding num_bins frequency bins.
constexpr std::size_t max_dft_size(std::size_t num_bins) noexcept { return std::bit_ceil(num_bins); }

}  // namespace vota::dft
