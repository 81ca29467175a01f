#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <utility>

namespace vota::dft {

/// DFT sizes of the CPU-vs-GPU comparison.
inline constexpr std::array<std::size_t, 14> kSizeCatalog{64,   128,  256,  512,   768,   1024,  1536,
                                                          2048, 4096, 6144, 8192, 12288, 36864, 49152};

/// Execution-time model of a transform on the host CPU versus offloaded to
/// an accelerator that needs a copy in and a copy out over the host bus.
struct CostModelParams {
  double cpu_coeff;              // s per N*log2(N)
  double gpu_kernel_coeff;       // s per N*log2(N)
  double copy_bytes_per_sample;  // bytes
  double copy_bandwidth;         // bytes/s
  double launch_overhead;        // s
};

/// Shipped defaults. cpu_coeff and gpu_kernel_coeff are order-of-magnitude
/// figures for an AVX transform and a GPU kernel; copy_bandwidth is then
/// placed inside copy_bandwidth_window() for a crossover at 12288 (see
/// fit_copy_bandwidth). At that crossover the two copies are ~80% of the
/// offload time.
inline constexpr CostModelParams kDefaultCostModel{
    .cpu_coeff = 2.5e-10,
    .gpu_kernel_coeff = 1.0e-11,
    .copy_bytes_per_sample = 8.0,  // two 32-bit floats per I/Q sample
    .copy_bandwidth = 6.0e9,
    .launch_overhead = 5.0e-6,
};

struct PredictedTimes {
  double cpu;
  double offload;
};

inline PredictedTimes predict_times(std::size_t n, const CostModelParams& p) {
  const double nn = static_cast<double>(n);
  const double work = nn * std::log2(nn);
  return {p.cpu_coeff * work,
          p.launch_overhead + 2.0 * nn * p.copy_bytes_per_sample / p.copy_bandwidth + p.gpu_kernel_coeff * work};
}

/// Smallest catalog size at which offloading is no slower than the CPU.
inline std::optional<std::size_t> crossover_size(const CostModelParams& p,
                                                 std::span<const std::size_t> catalog = kSizeCatalog) {
  for (std::size_t n : catalog) {
    const auto t = predict_times(n, p);
    if (t.offload <= t.cpu) return n;
  }
  return std::nullopt;
}

/// Half-open interval [lo, hi) of copy_bandwidth values for which
/// crossover_size(p, catalog) == target, all other parameters fixed. nullopt
/// if no bandwidth achieves it. Requires an ascending catalog.
inline std::optional<std::pair<double, double>> copy_bandwidth_window(const CostModelParams& p,
                                                                       std::span<const std::size_t> catalog,
                                                                       std::size_t target) {
  // offload <= cpu  <=>  2*N*b/BW <= (cpu - gpu)*N*log2 N - launch =: slack(N)
  auto slack = [&](std::size_t n) {
    const double nn = static_cast<double>(n);
    return (p.cpu_coeff - p.gpu_kernel_coeff) * nn * std::log2(nn) - p.launch_overhead;
  };
  auto copy_bytes = [&](std::size_t n) { return 2.0 * static_cast<double>(n) * p.copy_bytes_per_sample; };

  if (slack(target) <= 0.0) return std::nullopt;
  double lo = copy_bytes(target) / slack(target);
  double hi = INFINITY;
  bool found = false;
  for (std::size_t n : catalog) {
    if (n == target) {
      found = true;
      break;
    }
    if (slack(n) > 0.0) hi = std::min(hi, copy_bytes(n) / slack(n));  // offload must still lose at n
  }
  if (!found || !(lo < hi)) return std::nullopt;
  return std::pair{lo, hi};
}

/// Geometric midpoint of copy_bandwidth_window(), the fit behind
/// kDefaultCostModel.copy_bandwidth (rounded there to 6.0e9).
inline std::optional<double> fit_copy_bandwidth(const CostModelParams& p, std::span<const std::size_t> catalog,
                                                std::size_t target) {
  const auto w = copy_bandwidth_window(p, catalog, target);
  if (!w) return std::nullopt;
  return std::isfinite(w->second) ? std::sqrt(w->first * w->second) : 2.0 * w->first;
}

/// CSV columns: size, t_cpu_s, t_offload_s, winner.
inline void write_benchmark_csv(std::ostream& os, const CostModelParams& p,
                                std::span<const std::size_t> catalog = kSizeCatalog) {
  os << "size,t_cpu_s,t_offload_s,winner\n";
  char buf[128];
  for (std::size_t n : catalog) {
    const auto t = predict_times(n, p);
    std::snprintf(buf, sizeof buf, "%zu,%.9e,%.9e,%s\n", n, t.cpu, t.offload, t.offload <= t.cpu ? "offload" : "cpu");
    os << buf;
  }
}

}  // namespace vota::dft
