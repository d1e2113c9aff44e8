#pragma once

// Uniform symmetric sample grids, sampled functions, and the bridge between
// the discrete Fourier transform and the continuous convention
//   f^(xi) = int e^{-i t xi} f(t) dt,   f(t) = (2 pi)^{-1} int e^{i t xi} f^(xi) dxi.

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "tfweyl/error.hpp"
#include "tfweyl/parallel.hpp"

namespace tfweyl {

using cplx = std::complex<double>;

enum class SpaceTag : std::uint8_t { time = 0, freq = 1 };

inline SpaceTag flip(SpaceTag tag) { return tag == SpaceTag::time ? SpaceTag::freq : SpaceTag::time; }

/// One grid axis. A TIME axis (n, L) holds x_i = -L + i*dx with dx = 2L/n.
/// The FREQ axis with the same (n, L) is its DFT dual: xi_k = -pi/dx + k*dxi,
/// dxi = pi/L, so dx * dxi * n = 2 pi.
struct Axis {
  std::size_t n = 0;
  double half_extent = 0.0;
  SpaceTag tag = SpaceTag::time;

  Axis() = default;
  Axis(std::size_t n_, double L, SpaceTag tag_ = SpaceTag::time) : n(n_), half_extent(L), tag(tag_) {
    if (n < 4 || !std::has_single_bit(n)) throw error(errc::invalid_argument, "axis size must be a power of two >= 4");
    if (!(L > 0.0) || !std::isfinite(L)) throw error(errc::invalid_argument, "axis half-extent must be positive");
  }

  double time_step() const { return 2.0 * half_extent / static_cast<double>(n); }
  double freq_step() const { return std::numbers::pi / half_extent; }
  double spacing() const { return tag == SpaceTag::time ? time_step() : freq_step(); }
  double origin() const { return -spacing() * static_cast<double>(n / 2); }
  double point(std::size_t i) const { return origin() + spacing() * static_cast<double>(i); }
  std::size_t center() const { return n / 2; }
  Axis dual() const { return Axis(n, half_extent, flip(tag)); }

  /// Index of the lattice point at x, if x lies on the lattice (to 1e-9 steps).
  std::optional<std::size_t> index_of(double x) const {
    const double r = (x - origin()) / spacing();
    const double k = std::round(r);
    if (std::abs(r - k) > 1e-9 || k < 0 || k >= static_cast<double>(n)) return std::nullopt;
    return static_cast<std::size_t>(k);
  }

  bool operator==(const Axis& o) const {
    return n == o.n && tag == o.tag && std::abs(half_extent - o.half_extent) <= 1e-12 * half_extent;
  }
};

/// Complex samples on a product grid, row-major in axis order.
struct SampledFunction {
  std::vector<Axis> axes;
  std::vector<cplx> values;
  bool truncated = false;  // non-decaying function cut off at the grid edge

  SampledFunction() = default;
  explicit SampledFunction(std::vector<Axis> axes_, bool truncated_ = false)
      : axes(std::move(axes_)), values(total_size(axes), cplx{}), truncated(truncated_) {}
  SampledFunction(std::vector<Axis> axes_, std::vector<cplx> values_, bool truncated_ = false)
      : axes(std::move(axes_)), values(std::move(values_)), truncated(truncated_) {
    if (values.size() != total_size(axes)) throw error(errc::dimension_mismatch, "value count does not match grid");
  }

  static std::size_t total_size(const std::vector<Axis>& axes) {
    std::size_t s = 1;
    for (const auto& a : axes) s *= a.n;
    return s;
  }

  std::size_t dims() const { return axes.size(); }
  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }
  cplx& at(std::size_t i, std::size_t j) { return values[i * axes[1].n + j]; }
  const cplx& at(std::size_t i, std::size_t j) const { return values[i * axes[1].n + j]; }

  double quadrature_weight() const {
    double w = 1.0;
    for (const auto& a : axes) w *= a.spacing();
    return w;
  }

  SampledFunction& operator*=(cplx s) {
    for (auto& v : values) v *= s;
    return *this;
  }
  SampledFunction& operator+=(const SampledFunction& o) {
    if (axes != o.axes) throw error(errc::grid_mismatch, "sum of functions on different grids");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
  }
};

inline SampledFunction operator*(cplx s, SampledFunction f) { return f *= s; }
inline SampledFunction operator+(SampledFunction f, const SampledFunction& g) { return f += g; }

inline std::vector<Axis> make_axes(std::size_t dims, std::size_t n, double L) {
  return std::vector<Axis>(dims, Axis(n, L, SpaceTag::time));
}

// ---------------------------------------------------------------------------
// DFT engine

namespace detail {

class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  /// In-place unnormalized DFT with kernel e^{sign * 2 pi i n k / N}.
  void execute(std::span<cplx> data, int sign) {
    fftw_plan plan = get(data.size(), sign);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
  }

  ~FftPlans() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<cplx> scratch(n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

}  // namespace detail

enum class Direction { forward, inverse };

/// Continuous-convention transform of one line of samples on a symmetric
/// grid with spacing h (n points, origin -n h / 2):
///   forward: out_k = h * sum_n e^{-i u_n v_k} in_n
///   inverse: out_n = h / (2 pi) * sum_k e^{+i u_n v_k} in_k
/// where u, v are the grid and its dual. For n divisible by 4,
/// e^{-i u_n v_k} = (-1)^{n+k} e^{-2 pi i n k / N} exactly, so the bridge is a
/// sign flip on each side of a plain DFT.
inline void dft_bridge_line(std::span<cplx> line, double h, Direction dir) {
  for (std::size_t i = 1; i < line.size(); i += 2) line[i] = -line[i];
  detail::FftPlans::instance().execute(line, dir == Direction::forward ? -1 : +1);
  const double scale = dir == Direction::forward ? h : h / (2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < line.size(); ++i) line[i] *= (i % 2 ? -scale : scale);
}

/// Applies the bridge along one axis of f; the axis tag flips.
inline SampledFunction partial_fourier(SampledFunction f, std::size_t axis, Direction dir) {
  if (axis >= f.dims()) throw error(errc::dimension_mismatch, "axis out of range");
  const std::size_t n = f.axes[axis].n;
  std::size_t inner = 1;
  for (std::size_t a = axis + 1; a < f.dims(); ++a) inner *= f.axes[a].n;
  const std::size_t outer = f.size() / (n * inner);
  const double h = f.axes[axis].spacing();
  parallel_for(outer * inner, [&](std::size_t job) {
    const std::size_t o = job / inner, in = job % inner;
    std::vector<cplx> line(n);
    for (std::size_t k = 0; k < n; ++k) line[k] = f.values[(o * n + k) * inner + in];
    dft_bridge_line(line, h, dir);
    for (std::size_t k = 0; k < n; ++k) f.values[(o * n + k) * inner + in] = line[k];
  });
  f.axes[axis] = f.axes[axis].dual();
  return f;
}

/// Full forward transform; every axis must be TIME.
inline SampledFunction fourier(SampledFunction f) {
  for (const auto& a : f.axes)
    if (a.tag != SpaceTag::time) throw error(errc::space_tag_mismatch, "fourier expects TIME axes");
  for (std::size_t a = 0; a < f.dims(); ++a) f = partial_fourier(std::move(f), a, Direction::forward);
  return f;
}

/// Full inverse transform; every axis must be FREQ.
inline SampledFunction inverse_fourier(SampledFunction f) {
  for (const auto& a : f.axes)
    if (a.tag != SpaceTag::freq) throw error(errc::space_tag_mismatch, "inverse_fourier expects FREQ axes");
  for (std::size_t a = 0; a < f.dims(); ++a) f = partial_fourier(std::move(f), a, Direction::inverse);
  return f;
}

// ---------------------------------------------------------------------------
// Elementary phase-space operators (1-d, lattice-exact)

/// Pi(x, xi) f(t) = e^{i t xi} f(t - x), with a circular index shift.
inline SampledFunction phase_space_shift(const SampledFunction& f, double x, double xi) {
  if (f.dims() != 1 || f.axes[0].tag != SpaceTag::time)
    throw error(errc::dimension_mismatch, "phase_space_shift expects a 1-d TIME function");
  const Axis& ax = f.axes[0];
  const double rs = x / ax.time_step(), rm = xi / ax.freq_step();
  if (std::abs(rs - std::round(rs)) > 1e-9) throw error(errc::off_lattice, "shift is not a multiple of the time step");
  if (std::abs(rm - std::round(rm)) > 1e-9)
    throw error(errc::off_lattice, "modulation is not a multiple of the frequency step");
  const auto n = static_cast<long>(ax.n);
  const long s = static_cast<long>(std::round(rs));
  SampledFunction out(f.axes, f.truncated);
  for (long i = 0; i < n; ++i) {
    const long src = ((i - s) % n + n) % n;
    out.values[static_cast<std::size_t>(i)] =
        std::polar(1.0, ax.point(static_cast<std::size_t>(i)) * xi) * f.values[static_cast<std::size_t>(src)];
  }
  return out;
}

/// I f(t) = f(-t): index n pairs with index N - n (mod N).
inline SampledFunction reflect(const SampledFunction& f) {
  if (f.dims() != 1) throw error(errc::dimension_mismatch, "reflect expects a 1-d function");
  const std::size_t n = f.axes[0].n;
  SampledFunction out(f.axes, f.truncated);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = f.values[(n - i) % n];
  return out;
}

/// <f, g> = sum f conj(g) * (product of spacings); conjugate-linear in g.
inline cplx inner_product(const SampledFunction& f, const SampledFunction& g) {
  if (f.axes != g.axes) throw error(errc::grid_mismatch, "inner_product on different grids");
  cplx s{};
  for (std::size_t i = 0; i < f.size(); ++i) s += f.values[i] * std::conj(g.values[i]);
  return s * f.quadrature_weight();
}

inline double l2_norm(const SampledFunction& f) { return std::sqrt(std::real(inner_product(f, f))); }

// ---------------------------------------------------------------------------
// Error measures shared by tests, the CLI identity suite and diagnostics.

/// max |a - b| / max |b| over the given values.
inline double relative_max_error(std::span<const cplx> a, std::span<const cplx> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0.0 ? num / den : num;
}

inline double relative_l2_error(std::span<const cplx> a, std::span<const cplx> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double relative_error(cplx a, cplx b) {
  const double den = std::abs(b);
  return den > 0.0 ? std::abs(a - b) / den : std::abs(a - b);
}

}  // namespace tfweyl
