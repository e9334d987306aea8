#include "fiberplan/tensor_cache.hpp"

#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <ostream>

namespace fiberplan {

static_assert(std::endian::native == std::endian::little, "cache I/O assumes a little-endian host");

namespace {

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::istream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

}  // namespace

std::filesystem::path cache_directory() {
  const char* env = std::getenv("FIBERPLAN_CACHE_DIR");
  std::filesystem::path dir = (env && *env) ? std::filesystem::path(env) : std::filesystem::path(".fiberplan_cache");
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path cache_file(const SystemConfig& cfg, const QuadratureSpec& spec) {
  // One slot per physical layout (channels x modes x spans) and resolution;
  // a different fingerprint in that slot is a stale entry.
  const std::string name = "x_" + std::to_string(cfg.num_channels()) + "ch_" + std::to_string(cfg.num_modes()) +
                           "m_" + std::to_string(cfg.num_spans()) + "s_r" + std::to_string(spec.points_per_band) +
                           ".fpxt";
  return cache_directory() / name;
}

void write_tensor_cache(const std::filesystem::path& path, const XTensors& X) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericError("cannot write tensor cache '" + tmp + "'");
    out.write("FPXT", 4);
    put<std::uint32_t>(out, kCacheFormatVersion);
    put<std::uint64_t>(out, X.fingerprint);
    put<std::int32_t>(out, X.quad.points_per_band);
    put<double>(out, X.quad.rel_tol);
    put<std::uint64_t>(out, X.n_channels());
    put<std::uint64_t>(out, X.n_modes());
    put<std::uint64_t>(out, X.n_kinds());
    put<std::uint64_t>(out, X.n_spans());
    for (auto k : X.span_kinds()) put<std::uint64_t>(out, k);
    put<std::uint64_t>(out, X.values().size());
    out.write(reinterpret_cast<const char*>(X.values().data()),
              static_cast<std::streamsize>(X.values().size() * sizeof(double)));
    put<double>(out, X.max_rel_error);
    if (!out) throw NumericError("short write on tensor cache '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::optional<XTensors> read_tensor_cache(const std::filesystem::path& path, std::string* why) {
  auto fail = [&](const std::string& msg) -> std::optional<XTensors> {
    if (why) *why = msg;
    return std::nullopt;
  };
  std::ifstream in(path, std::ios::binary);
  if (!in) return fail("missing");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "FPXT", 4) != 0) return fail("bad magic");
  std::uint32_t version = 0;
  std::uint64_t fp = 0, nch = 0, nm = 0, nk = 0, ns = 0, count = 0;
  std::int32_t R = 0;
  double tol = 0.0;
  if (!get(in, version) || version != kCacheFormatVersion) return fail("format version mismatch");
  if (!get(in, fp) || !get(in, R) || !get(in, tol) || !get(in, nch) || !get(in, nm) || !get(in, nk) || !get(in, ns))
    return fail("truncated header");
  if (nch == 0 || nm == 0 || nk == 0 || nch > 4096 || nm > 64 || ns > 100000) return fail("implausible dimensions");
  std::vector<std::size_t> kinds(ns);
  for (auto& k : kinds) {
    std::uint64_t v = 0;
    if (!get(in, v) || v >= nk) return fail("bad span kind table");
    k = v;
  }
  XTensors X(nch, nm, kinds, nk);
  if (!get(in, count) || count != X.values().size()) return fail("value count mismatch");
  if (!in.read(reinterpret_cast<char*>(X.values().data()), static_cast<std::streamsize>(count * sizeof(double))))
    return fail("truncated values");
  if (!get(in, X.max_rel_error)) return fail("truncated trailer");
  X.fingerprint = fp;
  X.quad.points_per_band = R;
  X.quad.rel_tol = tol;
  return X;
}

XTensors load_or_compute_x(const SystemConfig& cfg, const QuadratureSpec& spec, std::ostream* log) {
  spec.check();
  const auto path = cache_file(cfg, spec);
  std::string why;
  if (auto X = read_tensor_cache(path, &why)) {
    if (X->fingerprint == cfg.fingerprint && X->quad.points_per_band == spec.points_per_band &&
        X->quad.rel_tol == spec.rel_tol && X->n_spans() == cfg.num_spans()) {
      X->quad = spec;
      X->set_occupancy(occupancy(cfg));
      return *std::move(X);
    }
    if (log)
      *log << "warning: tensor cache " << path.string() << " is stale (fingerprint "
           << fingerprint_hex(X->fingerprint) << ", config " << fingerprint_hex(cfg.fingerprint)
           << "); recomputing\n";
  } else if (why != "missing" && log) {
    *log << "warning: tensor cache " << path.string() << " unusable (" << why << "); recomputing\n";
  }
  XTensors X = compute_x_tensors(cfg, spec);
  write_tensor_cache(path, X);
  return X;
}

}  // namespace fiberplan
