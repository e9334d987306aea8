#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "fiberplan/xtensor.hpp"

namespace fiberplan {

// Layout, all little-endian:
//   char[4] "FPXT" | u32 version | u64 fingerprint | i32 points_per_band |
//   f64 rel_tol | u64 n_channels | u64 n_modes | u64 n_kinds | u64 n_spans |
//   u64 span_kind[n_spans] | u64 count | f64 values[count] | f64 max_rel_error
inline constexpr std::uint32_t kCacheFormatVersion = 1;

/// $FIBERPLAN_CACHE_DIR, else ./.fiberplan_cache. Created if missing.
std::filesystem::path cache_directory();

std::filesystem::path cache_file(const SystemConfig& cfg, const QuadratureSpec& spec);

void write_tensor_cache(const std::filesystem::path& path, const XTensors& X);

/// Empty when the file is missing, unreadable or corrupt. `why` receives
/// the reason in those cases.
std::optional<XTensors> read_tensor_cache(const std::filesystem::path& path, std::string* why = nullptr);

/// Loads a cached tensor set when its header matches (fingerprint and
/// quadrature spec); recomputes and rewrites it otherwise. Warnings go to
/// `log` when non-null.
XTensors load_or_compute_x(const SystemConfig& cfg, const QuadratureSpec& spec, std::ostream* log = nullptr);

}  // namespace fiberplan
