#include "vota/resource_model.hpp"

#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vota/json_io.hpp"

using namespace vota;

namespace {

SpectrumSlice slice(Hz center, Hz bw) {
  SpectrumSlice s;
  s.center_freq = center;
  s.bandwidth = bw;
  s.att_tx = s.att_rx = 8;
  return s;
}

}  // namespace

TEST(CoreSet, NormalizesAndRenders) {
  CoreSet s{5, 1, 3, 1, 4};
  EXPECT_EQ(s.indices(), (std::vector<int>{1, 3, 4, 5}));
  EXPECT_EQ(s.to_string(), "1,3-5");
  EXPECT_EQ(CoreSet::range(0, 12).to_string(), "0-11");
  EXPECT_TRUE(CoreSet{}.empty());
}

TEST(CoresDisjoint, ReferenceSlices) {
  EXPECT_TRUE(cores_disjoint(CoreSet::range(0, 12), CoreSet::range(12, 8)));
  EXPECT_TRUE(cores_disjoint(CoreSet::range(0, 12), CoreSet{}));
  EXPECT_FALSE(cores_disjoint(CoreSet::range(0, 12), CoreSet{11, 12}));
}

TEST(CoresDisjoint, MatchesUnionCardinality) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> core(0, 31), len(0, 10);
  for (int iter = 0; iter < 2000; ++iter) {
    std::vector<int> va, vb;
    for (int i = len(rng); i > 0; --i) va.push_back(core(rng));
    for (int i = len(rng); i > 0; --i) vb.push_back(core(rng));
    const CoreSet a(va), b(vb);
    EXPECT_EQ(cores_disjoint(a, b), a.size() + b.size() == a.united(b).size());
    EXPECT_EQ(cores_disjoint(a, b), cores_disjoint(b, a));
  }
}

TEST(BandsConflict, ReferenceSlicesDoNotConflict) {
  EXPECT_FALSE(bands_conflict(slice(GHz(3.32), MHz(40)), slice(GHz(2.59), MHz(40)), MHz(10)));
}

TEST(BandsConflict, IdenticalSlicesConflict) {
  const auto s = slice(GHz(3.32), MHz(40));
  EXPECT_TRUE(bands_conflict(s, s, 0));
}

TEST(BandsConflict, TouchingEdgesConflictAtZeroGuard) {
  // [3.30, 3.34] and [3.34, 3.38] GHz share the closed endpoint 3.34 GHz.
  EXPECT_TRUE(bands_conflict(slice(GHz(3.32), MHz(40)), slice(GHz(3.36), MHz(40)), 0));
  // One Hz apart is clear without guard, but any guard >= 1 Hz closes the gap.
  const auto a = slice(GHz(3.32), MHz(40));
  auto b = slice(GHz(3.36) + 1, MHz(40));
  EXPECT_FALSE(bands_conflict(a, b, 0));
  EXPECT_TRUE(bands_conflict(a, b, 2));
}

TEST(BandsConflict, SymmetricAndMonotoneInGuard) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<Hz> center(MHz(2400), MHz(3800)), bw(MHz(1), MHz(100)), guard(0, MHz(50));
  for (int iter = 0; iter < 5000; ++iter) {
    const auto a = slice(center(rng), bw(rng));
    const auto b = slice(center(rng), bw(rng));
    const Hz g = guard(rng);
    const bool c = bands_conflict(a, b, g);
    EXPECT_EQ(c, bands_conflict(b, a, g));
    if (c) {
      EXPECT_TRUE(bands_conflict(a, b, g + 1));
      EXPECT_TRUE(bands_conflict(a, b, g + MHz(7)));
    }
  }
}

TEST(ValidateInventory, ReferenceDefaultIsClean) {
  EXPECT_TRUE(validate_inventory(reference_inventory()).empty());
}

TEST(ValidateInventory, OverlappingBandsNameBothEntries) {
  auto inv = reference_inventory();
  inv.band_catalog.push_back({"n78-wide", MHz(3320), MHz(3400), true, true});
  const auto v = validate_inventory(inv);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("n78-left-edge"), std::string::npos);
  EXPECT_NE(v[0].find("n78-wide"), std::string::npos);
}

TEST(ValidateInventory, ReservedCoreOutOfRange) {
  auto inv = reference_inventory();
  inv.reserved_cores = CoreSet{32};
  const auto v = validate_inventory(inv);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("reserved_cores"), std::string::npos);
  EXPECT_NE(v[0].find("32"), std::string::npos);
}

TEST(ValidateInventory, IdempotentAndCatchesEndpointIndexMismatch) {
  auto inv = reference_inventory();
  inv.devices[3].endpoints[0].index = 7;  // "/dev/ttyUSB0" with index 7
  inv.guard_band = -1;
  const auto first = validate_inventory(inv);
  EXPECT_EQ(first.size(), 2u);
  EXPECT_EQ(first, validate_inventory(inv));
}

TEST(InventoryFile, ShippedFileReproducesDefault) {
  const HostInventory inv = io::load_inventory(test::source_path("config/inventory.json"));
  const HostInventory ref = reference_inventory();
  EXPECT_EQ(inv.total_cores, 32);
  EXPECT_EQ(inv.guard_band, MHz(10));
  EXPECT_EQ(inv.band_catalog, ref.band_catalog);
  EXPECT_EQ(io::inventory_to_json(inv), io::inventory_to_json(ref));
}

TEST(InventoryFile, RejectsUnknownField) {
  auto j = io::inventory_to_json(reference_inventory());
  j["cpu_governor"] = "performance";
  try {
    io::inventory_from_json(io::json::parse(j.dump()));
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ParseError);
    EXPECT_NE(std::string(e.what()).find("cpu_governor"), std::string::npos);
  }
}
