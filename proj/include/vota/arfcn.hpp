#pragma once

#include <cstdint>

#include "vota/error.hpp"
#include "vota/resource_model.hpp"

namespace vota {

// NR global frequency raster (3GPP TS 38.104) restricted to the two
// segments below 24.25 GHz.
namespace raster {
constexpr Hz kSegmentBoundary = 3'000'000'000;
constexpr Hz kUpperLimit = 24'250'000'000;
constexpr Hz kLowStep = 5'000;
constexpr Hz kHighStep = 15'000;
constexpr std::int64_t kHighOffset = 600'000;
constexpr std::int64_t kMaxArfcn = kHighOffset + (kUpperLimit - kSegmentBoundary - 1) / kHighStep;
}  // namespace raster

struct ArfcnResult {
  std::int64_t arfcn{0};
  Hz snap{0};  // requested freq minus the raster point it was rounded to

  friend bool operator==(const ArfcnResult&, const ArfcnResult&) = default;
};

namespace detail {
// Nearest multiple of step, ties away from zero; both operands non-negative.
constexpr std::int64_t round_div(Hz num, Hz step) { return (num + step / 2) / step; }
}  // namespace detail

inline Hz freq_from_nr_arfcn(std::int64_t n) {
  if (n < 0 || n > raster::kMaxArfcn) throw Error(Errc::OutOfRaster, "NR-ARFCN " + std::to_string(n));
  if (n < raster::kHighOffset) return n * raster::kLowStep;
  return raster::kSegmentBoundary + (n - raster::kHighOffset) * raster::kHighStep;
}

inline ArfcnResult nr_arfcn_from_freq(Hz freq) {
  if (freq < 0 || freq >= raster::kUpperLimit)
    throw Error(Errc::OutOfRaster, "frequency " + std::to_string(freq) + " Hz outside [0, 24.25 GHz)");
  std::int64_t n = freq < raster::kSegmentBoundary
                       ? detail::round_div(freq, raster::kLowStep)
                       : raster::kHighOffset + detail::round_div(freq - raster::kSegmentBoundary, raster::kHighStep);
  if (n > raster::kMaxArfcn) n = raster::kMaxArfcn;
  return {n, freq - freq_from_nr_arfcn(n)};
}

}  // namespace vota
