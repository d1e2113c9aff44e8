#pragma once

// Binary field files, JSON sidecars, CSV artifacts and content hashes.
//
// Field file: 16-byte magic "TFWEYLFLD\0" (zero padded), u32 dims, per axis
// (u32 n, f64 L, u8 tag), then n_0 * ... * n_{dims-1} interleaved f64
// (re, im) pairs, row-major. All integers and floats are little-endian.
// An optional trailer follows the values:
//   "PSF\0" u8 kind, per axis (u32 base_n, u32 stride, u32 offset),
//           u32 base_dims, per base axis (u32 n, f64 L, u8 tag)
//   "OPM\0" u8 convention
// For phase-space fields the header n is the lattice count and L, tag are
// those of the lattice base axis.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <openssl/evp.h>

#include "json.hpp"

#include "tfweyl/diagnostics.hpp"
#include "tfweyl/error.hpp"
#include "tfweyl/grid.hpp"
#include "tfweyl/operators.hpp"
#include "tfweyl/transforms.hpp"
#include "tfweyl/weights.hpp"

namespace tfweyl::io {

using json = nlohmann::ordered_json;

inline constexpr std::array<char, 16> kMagic{'T', 'F', 'W', 'E', 'Y', 'L', 'F', 'L', 'D', '\0'};

// ---------------------------------------------------------------------------
// Hashing

inline std::string sha256_hex(const void* data, std::size_t size) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data, size) != 1 || EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
    throw error(errc::io_error, "sha256 failed");
  std::ostringstream s;
  for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return s.str();
}

inline std::string sha256_hex(const std::string& bytes) { return sha256_hex(bytes.data(), bytes.size()); }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io_error, "cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw error(errc::io_error, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw error(errc::io_error, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Little-endian encoding

namespace detail {

template <typename T>
void put(std::string& out, T v) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.append(bytes.data(), bytes.size());
}

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > s_.size()) throw error(errc::io_error, "truncated field file");
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), s_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    pos_ += sizeof(T);
    return std::bit_cast<T>(bytes);
  }

  std::string take(std::size_t n) {
    if (pos_ + n > s_.size()) throw error(errc::io_error, "truncated field file");
    std::string out = s_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool done() const { return pos_ == s_.size(); }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

struct AxisRecord {
  std::uint32_t n;
  double L;
  std::uint8_t tag;
};

inline void put_axis(std::string& out, std::uint32_t n, double L, SpaceTag tag) {
  put(out, n);
  put(out, L);
  put(out, static_cast<std::uint8_t>(tag));
}

inline AxisRecord get_axis(Reader& r) {
  AxisRecord a{r.get<std::uint32_t>(), r.get<double>(), r.get<std::uint8_t>()};
  if (a.tag > 1) throw error(errc::io_error, "bad space tag");
  return a;
}

inline Axis to_axis(const AxisRecord& a) { return Axis(a.n, a.L, static_cast<SpaceTag>(a.tag)); }

inline std::string header(const std::vector<AxisRecord>& axes) {
  std::string out(kMagic.data(), kMagic.size());
  put(out, static_cast<std::uint32_t>(axes.size()));
  for (const auto& a : axes) put_axis(out, a.n, a.L, static_cast<SpaceTag>(a.tag));
  return out;
}

inline void put_values(std::string& out, const std::vector<cplx>& v) {
  for (const cplx& z : v) {
    put(out, z.real());
    put(out, z.imag());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Field files

inline std::string encode(const SampledFunction& f) {
  std::vector<detail::AxisRecord> axes;
  for (const Axis& a : f.axes)
    axes.push_back({static_cast<std::uint32_t>(a.n), a.half_extent, static_cast<std::uint8_t>(a.tag)});
  std::string out = detail::header(axes);
  detail::put_values(out, f.values);
  return out;
}

inline std::string encode(const PhaseSpaceField& V) {
  std::vector<detail::AxisRecord> axes;
  for (const LatticeAxis& l : V.lattice)
    axes.push_back({static_cast<std::uint32_t>(l.count), l.base.half_extent, static_cast<std::uint8_t>(l.base.tag)});
  std::string out = detail::header(axes);
  detail::put_values(out, V.values);
  out.append("PSF", 4);
  detail::put(out, static_cast<std::uint8_t>(V.kind));
  for (const LatticeAxis& l : V.lattice) {
    detail::put(out, static_cast<std::uint32_t>(l.base.n));
    detail::put(out, static_cast<std::uint32_t>(l.stride));
    detail::put(out, static_cast<std::uint32_t>(l.offset));
  }
  detail::put(out, static_cast<std::uint32_t>(V.base_grid.size()));
  for (const Axis& a : V.base_grid) detail::put_axis(out, static_cast<std::uint32_t>(a.n), a.half_extent, a.tag);
  return out;
}

inline std::string encode(const OperatorMatrix& M) {
  const auto n = static_cast<std::uint32_t>(M.grid.n);
  const auto tag = static_cast<std::uint8_t>(M.grid.tag);
  std::string out = detail::header({{n, M.grid.half_extent, tag}, {n, M.grid.half_extent, tag}});
  for (Eigen::Index i = 0; i < M.entries.rows(); ++i)
    for (Eigen::Index j = 0; j < M.entries.cols(); ++j) {
      detail::put(out, M.entries(i, j).real());
      detail::put(out, M.entries(i, j).imag());
    }
  out.append("OPM", 4);
  detail::put(out, static_cast<std::uint8_t>(M.convention));
  return out;
}

/// Exactly one member is set.
struct Decoded {
  std::optional<SampledFunction> function;
  std::optional<PhaseSpaceField> field;
  std::optional<OperatorMatrix> op;
};

inline Decoded decode(const std::string& bytes) {
  detail::Reader r(bytes);
  if (r.take(kMagic.size()) != std::string(kMagic.data(), kMagic.size())) throw error(errc::io_error, "bad magic");
  const auto dims = r.get<std::uint32_t>();
  if (dims == 0 || dims > 8) throw error(errc::io_error, "bad dimension count");
  std::vector<detail::AxisRecord> axes;
  std::size_t count = 1;
  for (std::uint32_t a = 0; a < dims; ++a) {
    axes.push_back(detail::get_axis(r));
    count *= axes.back().n;
  }
  std::vector<cplx> values(count);
  for (auto& z : values) {
    const double re = r.get<double>();
    z = {re, r.get<double>()};
  }
  Decoded out;
  if (r.done()) {
    std::vector<Axis> grid;
    for (const auto& a : axes) grid.push_back(detail::to_axis(a));
    out.function = SampledFunction(std::move(grid), std::move(values));
    return out;
  }
  const std::string tag = r.take(4);
  if (tag == std::string("OPM", 4)) {
    const auto c = r.get<std::uint8_t>();
    if (c != 0 || dims != 2 || axes[0].n != axes[1].n) throw error(errc::io_error, "bad operator trailer");
    const Axis grid = detail::to_axis(axes[0]);
    const auto n = static_cast<Eigen::Index>(grid.n);
    Eigen::MatrixXcd E(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) E(i, j) = values[static_cast<std::size_t>(i * n + j)];
    out.op = OperatorMatrix(grid, std::move(E));
    out.op->convention = static_cast<OperatorConvention>(c);
  } else if (tag == std::string("PSF", 4)) {
    const auto kind = r.get<std::uint8_t>();
    if (kind > 3) throw error(errc::io_error, "bad field kind");
    std::vector<LatticeAxis> lattice;
    for (std::uint32_t a = 0; a < dims; ++a) {
      const auto base_n = r.get<std::uint32_t>(), stride = r.get<std::uint32_t>(), offset = r.get<std::uint32_t>();
      lattice.emplace_back(Axis(base_n, axes[a].L, static_cast<SpaceTag>(axes[a].tag)), stride, offset);
      if (lattice.back().count != axes[a].n) throw error(errc::io_error, "lattice count does not match header");
    }
    std::vector<Axis> base;
    const auto nb = r.get<std::uint32_t>();
    for (std::uint32_t a = 0; a < nb; ++a) base.push_back(detail::to_axis(detail::get_axis(r)));
    PhaseSpaceField V(std::move(base), std::move(lattice), static_cast<FieldKind>(kind));
    V.values = std::move(values);
    out.field = std::move(V);
  } else {
    throw error(errc::io_error, "unknown trailer");
  }
  if (!r.done()) throw error(errc::io_error, "trailing bytes after trailer");
  return out;
}

/// Writes `bytes` to `path` and a JSON sidecar `path`.json; returns the
/// SHA-256 of the field file.
inline std::string write_field_file(const std::filesystem::path& path, const std::string& bytes, json provenance) {
  write_file(path, bytes);
  const std::string hash = sha256_hex(bytes);
  json side;
  side["file"] = path.filename().string();
  side["sha256"] = hash;
  side["bytes"] = bytes.size();
  side["provenance"] = std::move(provenance);
  write_file(path.string() + ".json", side.dump(2) + "\n");
  return hash;
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json num_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

/// index,re,im,modulus
inline std::string spectrum_csv(const std::vector<cplx>& eig) {
  std::string out = "index,re,im,modulus\n";
  for (std::size_t i = 0; i < eig.size(); ++i)
    out += std::to_string(i) + "," + detail::num(eig[i].real()) + "," + detail::num(eig[i].imag()) + "," +
           detail::num(std::abs(eig[i])) + "\n";
  return out;
}

struct NormSweepRow {
  double p, q, lambda, value;
};

/// p,q,lambda,value
inline std::string norm_sweep_csv(const std::vector<NormSweepRow>& rows) {
  std::string out = "p,q,lambda,value\n";
  for (const auto& r : rows)
    out += detail::num(r.p) + "," + detail::num(r.q) + "," + detail::num(r.lambda) + "," + detail::num(r.value) + "\n";
  return out;
}

/// <outer_role>,<inner_role>_star; nan where no stable value exists.
inline std::string mu_star_csv(const DecayReport& r) {
  std::string out = r.outer_role + "," + r.inner_role + "_star\n";
  for (std::size_t l = 0; l < r.lambda_list.size(); ++l)
    out += detail::num(r.lambda_list[l]) + "," + detail::num(r.mu_star[l]) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const Weight& w) {
  json j;
  j["kind"] = to_string(w.kind());
  j["a"] = w.a();
  j["c"] = w.c();
  return j;
}

inline json to_json(const HeuristicParams& p) {
  json j;
  j["boundary_ratio"] = p.boundary_ratio;
  j["ring_tolerance"] = p.ring_tolerance;
  j["compact_slack"] = p.compact_slack;
  return j;
}

/// Report with non-finite numbers as null; `inputs` maps names to hashes.
inline json to_json(const DecayReport& r, const json& inputs = json::object()) {
  json j;
  j["test"] = r.test;
  j["weight"] = r.weight;
  j["outer_role"] = r.outer_role;
  j["inner_role"] = r.inner_role;
  j["lambda_list"] = r.lambda_list;
  j["mu_grid"] = r.mu_grid;
  json sup = json::array(), flags = json::array(), stable = json::array();
  const std::size_t nm = r.mu_grid.size();
  for (std::size_t l = 0; l < r.lambda_list.size(); ++l) {
    json srow = json::array(), frow = json::array(), trow = json::array();
    for (std::size_t m = 0; m < nm; ++m) {
      srow.push_back(detail::num_json(r.sup(l, m)));
      frow.push_back(r.flagged(l, m));
      trow.push_back(r.stable[l * nm + m] != 0);
    }
    sup.push_back(std::move(srow));
    flags.push_back(std::move(frow));
    stable.push_back(std::move(trow));
  }
  j["sup_values"] = std::move(sup);
  j["boundary_flags"] = std::move(flags);
  j["stable"] = std::move(stable);
  json ms = json::array();
  for (double m : r.mu_star) ms.push_back(detail::num_json(m));
  j["mu_star"] = std::move(ms);
  j["decay_probe_used"] = r.decay_probe_used;
  j["decay_probe_ok"] = r.decay_probe_ok;
  json interior = json::array();
  for (auto b : r.interior_axes) interior.push_back(b != 0);
  j["interior_axes"] = std::move(interior);
  j["verdict"] = to_string(r.verdict);
  j["heuristic_params"] = to_json(r.params);
  j["inputs"] = inputs;
  return j;
}

inline json to_json(const ConditionReport& c) {
  json j;
  j["alpha"] = {{"pass", c.alpha_ok}, {"L", c.alpha_L}};
  j["alpha_prime"] = {{"pass", c.alpha_prime_ok}, {"max_excess", c.alpha_prime_max_excess}};
  j["beta"] = {{"pass", c.beta_ok}, {"integral", c.beta_integral}, {"tail_bound", detail::num_json(c.beta_tail)}};
  j["gamma"] = {{"pass", c.gamma_ok}, {"a", c.gamma_a}, {"b", c.gamma_b}};
  j["delta"] = {{"pass", c.delta_ok}, {"min_second_difference", c.delta_min_second_difference}};
  j["t_max"] = c.t_max;
  j["n_samples"] = c.n_samples;
  return j;
}

}  // namespace tfweyl::io
