#include "vota/arfcn.hpp"

#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace vota;

TEST(NrArfcn, SpecExamples) {
  EXPECT_EQ(nr_arfcn_from_freq(0), (ArfcnResult{0, 0}));
  EXPECT_EQ(nr_arfcn_from_freq(GHz(2.59)), (ArfcnResult{518000, 0}));
  EXPECT_EQ(nr_arfcn_from_freq(GHz(3.0)), (ArfcnResult{600000, 0}));
}

TEST(NrArfcn, SliceAnchorsOfReferenceBands) {
  EXPECT_EQ(nr_arfcn_from_freq(GHz(3.30)).arfcn, 620000);
  EXPECT_EQ(nr_arfcn_from_freq(GHz(2.57)).arfcn, 514000);
  // 3.32 GHz sits 1/3 of a 15 kHz step above raster point 621333.
  const auto ssb = nr_arfcn_from_freq(GHz(3.32));
  EXPECT_EQ(ssb.arfcn, 621333);
  EXPECT_EQ(ssb.snap, 5000);
}

TEST(NrArfcn, OffRasterSnapsToNearestPoint) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<Hz> f(0, raster::kUpperLimit - 1);
  for (int i = 0; i < 20000; ++i) {
    const Hz freq = f(rng);
    const auto r = nr_arfcn_from_freq(freq);
    EXPECT_EQ(freq - freq_from_nr_arfcn(r.arfcn), r.snap);
    // No neighbouring raster point is strictly closer.
    for (std::int64_t d : {-1, 1}) {
      const std::int64_t n = r.arfcn + d;
      if (n < 0 || n > raster::kMaxArfcn) continue;
      EXPECT_GE(std::llabs(freq - freq_from_nr_arfcn(n)), std::llabs(r.snap)) << freq;
    }
  }
}

TEST(NrArfcn, RoundTripOnRasterPoints) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::int64_t> n(0, raster::kMaxArfcn);
  for (int i = 0; i < 20000; ++i) {
    const std::int64_t a = n(rng);
    const Hz f = freq_from_nr_arfcn(a);
    EXPECT_EQ(nr_arfcn_from_freq(f), (ArfcnResult{a, 0}));
  }
}

TEST(NrArfcn, OutOfRaster) {
  EXPECT_ERRC(nr_arfcn_from_freq(GHz(24.25)), Errc::OutOfRaster);
  EXPECT_ERRC(nr_arfcn_from_freq(-1), Errc::OutOfRaster);
  EXPECT_ERRC(freq_from_nr_arfcn(raster::kMaxArfcn + 1), Errc::OutOfRaster);
  EXPECT_NO_THROW(nr_arfcn_from_freq(GHz(24.25) - 1));
}
