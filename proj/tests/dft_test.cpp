#include "vota/dft.hpp"

#include <algorithm>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vota/cost_model.hpp"

using namespace vota;
using namespace vota::dft;

namespace {

ComplexVec random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexVec v(n);
  for (auto& c : v) c = {u(rng), u(rng)};
  return v;
}

double max_abs(const ComplexVec& v) {
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, std::abs(c));
  return m;
}

double max_err(const ComplexVec& a, const ComplexVec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double energy(const ComplexVec& v) {
  double e = 0.0;
  for (const auto& c : v) e += std::norm(c);
  return e;
}

}  // namespace

TEST(DftNaive, Examples) {
  for (std::size_t n : {1u, 2u, 5u, 12u}) {
    EXPECT_EQ(dft_naive(ComplexVec(n)), ComplexVec(n));
    ComplexVec impulse(n);
    impulse[0] = 1.0;
    EXPECT_EQ(dft_naive(impulse), ComplexVec(n, Complex{1.0, 0.0}));
  }
  EXPECT_LT(max_err(dft_naive(ComplexVec{1.0, 1.0}), ComplexVec{2.0, 0.0}), 1e-15);
}

TEST(DftNaive, FourPointByHand) {
  const auto X = dft_naive(ComplexVec{1.0, 2.0, 3.0, 4.0});
  const ComplexVec expect{{10, 0}, {-2, 2}, {-2, 0}, {-2, -2}};
  EXPECT_LT(max_err(X, expect), 1e-12);
}

TEST(Fft, MatchesNaiveOnCatalogUpTo8192) {
  for (std::size_t n : kSizeCatalog) {
    if (n > 8192) continue;
    const auto x = random_vec(n, n);
    EXPECT_LE(max_err(fft(x), dft_naive(x)), 1e-9 * static_cast<double>(n) * max_abs(x)) << n;
  }
}

TEST(Fft, MatchesNaiveOnSmallSmoothSizes) {
  for (std::size_t n = 1; n <= 432; ++n) {
    if (!is_smooth_23(n)) continue;
    const auto x = random_vec(n, 1000 + n);
    EXPECT_LE(max_err(fft(x), dft_naive(x)), 1e-9 * static_cast<double>(n) * max_abs(x)) << n;
  }
}

TEST(Fft, SingleToneAt768) {
  const std::size_t n = 768;
  ComplexVec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::polar(1.0, 2.0 * std::numbers::pi * 5.0 * static_cast<double>(i) / n);
  const auto X = fft(x);
  EXPECT_NEAR(X[5].real(), 768.0, 1e-9 * n);
  EXPECT_NEAR(X[5].imag(), 0.0, 1e-9 * n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k != 5) {
      EXPECT_LT(std::abs(X[k]), 1e-9 * n) << k;
    }
  }
}

TEST(Fft, UnsupportedSizes) {
  EXPECT_ERRC(fft(ComplexVec(640)), Errc::UnsupportedSize);
  EXPECT_ERRC(idft(ComplexVec(640)), Errc::UnsupportedSize);
  EXPECT_ERRC(fft(ComplexVec(0)), Errc::UnsupportedSize);
  EXPECT_ERRC(fft(ComplexVec(7)), Errc::UnsupportedSize);
  EXPECT_NO_THROW(fft(ComplexVec(1)));
}

TEST(Idft, Examples) {
  for (std::size_t n : {1u, 6u, 64u}) {
    ComplexVec impulse(n);
    impulse[0] = 1.0;
    EXPECT_LT(max_err(idft(ComplexVec(n, Complex{1.0, 0.0})), impulse), 1e-12);
    EXPECT_EQ(idft(ComplexVec(n)), ComplexVec(n));
  }
}

TEST(Idft, RoundTripAndParsevalOnCatalog) {
  for (std::size_t n : kSizeCatalog) {
    const auto x = random_vec(n, 7 * n);
    const auto X = fft(x);
    EXPECT_LE(max_err(idft(X), x), 1e-9 * max_abs(x)) << n;
    const double ex = energy(x), eX = energy(X) / static_cast<double>(n);
    EXPECT_LE(std::abs(ex - eX), 1e-9 * ex) << n;
  }
}

TEST(Fft, Linearity) {
  const Complex a{0.3, -1.2}, b{2.0, 0.5};
  for (std::size_t n : {96u, 1536u, 6144u}) {
    const auto x = random_vec(n, 1), y = random_vec(n, 2);
    ComplexVec mix(n);
    for (std::size_t i = 0; i < n; ++i) mix[i] = a * x[i] + b * y[i];
    const auto X = fft(x), Y = fft(y), M = fft(mix);
    ComplexVec expect(n);
    for (std::size_t i = 0; i < n; ++i) expect[i] = a * X[i] + b * Y[i];
    EXPECT_LE(max_err(M, expect), 1e-9 * static_cast<double>(n) * max_abs(mix)) << n;
  }
}

TEST(Fft, ConcurrentUseOfSharedPlans) {
  const auto x = random_vec(12288, 3);
  const auto ref = fft(x);
  std::vector<std::thread> ts;
  std::vector<double> errs(8);
  for (int i = 0; i < 8; ++i)
    ts.emplace_back([&, i] { errs[static_cast<std::size_t>(i)] = max_err(fft(x), ref); });
  for (auto& t : ts) t.join();
  for (double e : errs) EXPECT_EQ(e, 0.0);
}

TEST(MaxDftSize, Examples) {
  EXPECT_EQ(max_dft_size(3335), 4096u);
  EXPECT_EQ(max_dft_size(1), 1u);
  EXPECT_EQ(max_dft_size(4096), 4096u);
  EXPECT_EQ(max_dft_size(4097), 8192u);
  for (std::size_t b = 1; b < 5000; ++b) {
    const std::size_t s = max_dft_size(b);
    EXPECT_GE(s, b);
    EXPECT_LT(s / 2, b);
    EXPECT_EQ(s & (s - 1), 0u);
  }
}

TEST(SizeCatalog, AllSmooth) {
  for (std::size_t n : kSizeCatalog) EXPECT_TRUE(is_smooth_23(n)) << n;
  EXPECT_TRUE(std::is_sorted(kSizeCatalog.begin(), kSizeCatalog.end()));
}
