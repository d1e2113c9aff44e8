#pragma once

// Phase-space transforms on sample grids: STFT and its inversion, cross-Wigner
// and the Wigner-like transform, cross-ambiguity, and the 4-variable STFT of
// a symbol.
//
// Wigner-type transforms use half steps: y_m = 2 m dx, so x +- y/2 is always a
// grid point. Their frequency axis is FREQ(N, 2L): spacing dxi/2 and range
// [-pi/(2 dx), pi/(2 dx)).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "tfweyl/error.hpp"
#include "tfweyl/grid.hpp"
#include "tfweyl/parallel.hpp"

namespace tfweyl {

enum class FieldKind : std::uint8_t { stft = 0, wigner = 1, ambiguity = 2, stft4 = 3 };

inline const char* to_string(FieldKind k) {
  switch (k) {
    case FieldKind::stft: return "stft";
    case FieldKind::wigner: return "wigner";
    case FieldKind::ambiguity: return "ambiguity";
    case FieldKind::stft4: return "stft4";
  }
  return "?";
}

/// Every stride-th point of a grid axis, starting at offset.
struct LatticeAxis {
  Axis base;
  std::size_t stride = 1;
  std::size_t offset = 0;
  std::size_t count = 0;

  LatticeAxis() = default;
  LatticeAxis(Axis b, std::size_t stride_ = 1, std::size_t offset_ = 0) : base(b), stride(stride_), offset(offset_) {
    if (stride == 0 || offset >= base.n) throw error(errc::invalid_argument, "lattice stride/offset out of range");
    count = (base.n - offset + stride - 1) / stride;
  }

  /// Stride-s sub-lattice that contains the origin.
  static LatticeAxis centered(Axis b, std::size_t stride) { return LatticeAxis(b, stride, (b.n / 2) % stride); }

  std::size_t base_index(std::size_t i) const { return offset + i * stride; }
  double point(std::size_t i) const { return base.point(base_index(i)); }
  double spacing() const { return base.spacing() * static_cast<double>(stride); }
  bool full() const { return stride == 1 && offset == 0; }
  bool operator==(const LatticeAxis& o) const {
    return base == o.base && stride == o.stride && offset == o.offset;
  }
};

/// Values of a phase-space transform on a product lattice, row-major in
/// lattice order. base_grid is the grid of the analyzed function(s).
struct PhaseSpaceField {
  std::vector<Axis> base_grid;
  std::vector<LatticeAxis> lattice;
  std::vector<cplx> values;
  FieldKind kind = FieldKind::stft;

  PhaseSpaceField() = default;
  PhaseSpaceField(std::vector<Axis> base, std::vector<LatticeAxis> lat, FieldKind k)
      : base_grid(std::move(base)), lattice(std::move(lat)), kind(k) {
    std::size_t s = 1;
    for (const auto& l : lattice) s *= l.count;
    values.assign(s, cplx{});
  }

  std::size_t dims() const { return lattice.size(); }
  std::size_t size() const { return values.size(); }
  cplx& at(std::size_t i, std::size_t j) { return values[i * lattice[1].count + j]; }
  const cplx& at(std::size_t i, std::size_t j) const { return values[i * lattice[1].count + j]; }
  std::size_t flat(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return ((i * lattice[1].count + j) * lattice[2].count + k) * lattice[3].count + l;
  }
  cplx& at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) { return values[flat(i, j, k, l)]; }
  const cplx& at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const { return values[flat(i, j, k, l)]; }

  /// Lattice cell volume used by quadratures over the field.
  double cell_measure() const {
    double m = 1.0;
    for (const auto& l : lattice) m *= l.spacing();
    return m;
  }

  /// Full-lattice fields are ordinary sampled functions on the lattice bases.
  SampledFunction to_sampled() const {
    std::vector<Axis> axes;
    for (const auto& l : lattice) {
      if (!l.full()) throw error(errc::lattice_incompatible, "sub-lattice field has no grid representation");
      axes.push_back(l.base);
    }
    return SampledFunction(std::move(axes), values);
  }
};

inline std::vector<Axis> stft_axes(const Axis& base) { return {base, base.dual()}; }

/// Grid of Wigner-type outputs and Weyl symbols over a 1-d TIME axis.
inline std::vector<Axis> wigner_axes(const Axis& base) {
  return {base, Axis(base.n, 2.0 * base.half_extent, SpaceTag::freq)};
}

/// Phase-space grid with equal spacing 2L/n on both axes, covering [-L, L)^2.
inline std::vector<Axis> square_phase_axes(std::size_t n, double L) {
  return {Axis(n, L, SpaceTag::time), Axis(n, std::numbers::pi * static_cast<double>(n) / (2.0 * L), SpaceTag::freq)};
}

namespace detail {

inline void require_line(const SampledFunction& f, const char* what) {
  if (f.dims() != 1 || f.axes[0].tag != SpaceTag::time)
    throw error(errc::dimension_mismatch, std::string(what) + " expects 1-d TIME functions");
}

inline void require_same_grid(const SampledFunction& f, const SampledFunction& g, const char* what) {
  if (f.axes != g.axes) throw error(errc::grid_mismatch, std::string(what) + ": functions live on different grids");
}

inline bool all_zero(const SampledFunction& f) {
  return std::all_of(f.values.begin(), f.values.end(), [](cplx v) { return v == cplx{}; });
}

/// Row i of the output is 2dx * bridge over m of entry(i + m, i - m).
template <typename Entry>
SampledFunction half_step_wigner(const Axis& base, Entry&& entry) {
  const std::size_t n = base.n;
  const long h = static_cast<long>(n / 2), nn = static_cast<long>(n);
  SampledFunction out(wigner_axes(base));
  const double step = 2.0 * base.time_step();
  parallel_for(n, [&](std::size_t i) {
    std::vector<cplx> line(n);
    const long il = static_cast<long>(i);
    for (long m = -h; m < h; ++m) {
      const long p = il + m, q = il - m;
      line[static_cast<std::size_t>(m + h)] =
          (p >= 0 && p < nn && q >= 0 && q < nn) ? entry(static_cast<std::size_t>(p), static_cast<std::size_t>(q))
                                                  : cplx{};
    }
    dft_bridge_line(line, step, Direction::forward);
    std::copy(line.begin(), line.end(), out.values.begin() + static_cast<std::ptrdiff_t>(i * n));
  });
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// STFT

/// V_psi f(x, xi) = dx * sum_t f(t) conj(psi(t - x)) e^{-i t xi}, for x on
/// `shifts` (a lattice over f's axis) and xi on `mods` (over its dual).
inline PhaseSpaceField stft(const SampledFunction& f, const SampledFunction& psi, const LatticeAxis& shifts,
                            const LatticeAxis& mods) {
  detail::require_line(f, "stft");
  detail::require_same_grid(f, psi, "stft");
  if (detail::all_zero(psi)) throw error(errc::zero_window, "stft window is identically zero");
  const Axis& ax = f.axes[0];
  if (!(shifts.base == ax) || !(mods.base == ax.dual()))
    throw error(errc::lattice_incompatible, "stft lattice must sit on the function grid and its dual");
  const std::size_t n = ax.n;
  const long nn = static_cast<long>(n), h = nn / 2;
  PhaseSpaceField V({ax}, {shifts, mods}, FieldKind::stft);
  parallel_for(shifts.count, [&](std::size_t j) {
    const long jb = static_cast<long>(shifts.base_index(j));
    std::vector<cplx> line(n);
    for (long t = 0; t < nn; ++t) {
      const long w = t - jb + h;
      line[static_cast<std::size_t>(t)] =
          (w >= 0 && w < nn) ? f.values[static_cast<std::size_t>(t)] * std::conj(psi.values[static_cast<std::size_t>(w)])
                             : cplx{};
    }
    dft_bridge_line(line, ax.time_step(), Direction::forward);
    for (std::size_t k = 0; k < mods.count; ++k) V.at(j, k) = line[mods.base_index(k)];
  });
  return V;
}

/// Full-lattice STFT, or the stride-s sub-lattice through the origin.
inline PhaseSpaceField stft(const SampledFunction& f, const SampledFunction& psi, std::size_t stride = 1) {
  detail::require_line(f, "stft");
  return stft(f, psi, LatticeAxis::centered(f.axes[0], stride), LatticeAxis::centered(f.axes[0].dual(), stride));
}

/// Adjoint STFT on the full lattice: sum_z F(z) Pi(z) gamma dx dxi.
inline SampledFunction stft_adjoint(const PhaseSpaceField& F, const SampledFunction& gamma) {
  if (F.dims() != 2 || !F.lattice[0].full() || !F.lattice[1].full())
    throw error(errc::lattice_incompatible, "stft_adjoint needs a full STFT lattice");
  detail::require_line(gamma, "stft_adjoint");
  const Axis& ax = gamma.axes[0];
  if (!(F.lattice[0].base == ax) || !(F.lattice[1].base == ax.dual()))
    throw error(errc::grid_mismatch, "window and field on different grids");
  const std::size_t n = ax.n;
  const long nn = static_cast<long>(n), h = nn / 2;
  // Row j becomes (dxi / 2 pi) sum_k F(x_j, xi_k) e^{i t xi_k}.
  std::vector<cplx> rows = F.values;
  parallel_for(n, [&](std::size_t j) {
    dft_bridge_line(std::span<cplx>(rows.data() + j * n, n), ax.freq_step(), Direction::inverse);
  });
  SampledFunction out({ax});
  const double scale = 2.0 * std::numbers::pi * ax.time_step();
  parallel_for(n, [&](std::size_t t) {
    cplx s{};
    for (long j = 0; j < nn; ++j) {
      const long w = static_cast<long>(t) - j + h;
      if (w >= 0 && w < nn) s += rows[static_cast<std::size_t>(j) * n + t] * gamma.values[static_cast<std::size_t>(w)];
    }
    out.values[t] = s * scale;
  });
  return out;
}

/// f = (2 pi)^{-1} <gamma, psi>^{-1} sum_z V(z) Pi(z) gamma dx dxi on the full lattice.
inline SampledFunction stft_invert(const PhaseSpaceField& V, const SampledFunction& psi, const SampledFunction& gamma) {
  if (V.kind != FieldKind::stft) throw error(errc::invalid_argument, "stft_invert needs an STFT field");
  detail::require_line(psi, "stft_invert");
  detail::require_same_grid(psi, gamma, "stft_invert");
  if (!(V.base_grid[0] == psi.axes[0])) throw error(errc::grid_mismatch, "windows and field on different grids");
  const cplx pair = inner_product(gamma, psi);
  if (std::abs(pair) <= 1e-12 * std::max(1.0, l2_norm(gamma) * l2_norm(psi)))
    throw error(errc::degenerate_pair, "<gamma, psi> vanishes");
  SampledFunction out = stft_adjoint(V, gamma);
  out *= 1.0 / (2.0 * std::numbers::pi * pair);
  return out;
}

// ---------------------------------------------------------------------------
// Wigner-type transforms

/// Wig(g, f)(x, xi) = int g(x + y/2) conj(f(x - y/2)) e^{-i y xi} dy.
inline PhaseSpaceField cross_wigner(const SampledFunction& g, const SampledFunction& f) {
  detail::require_line(g, "cross_wigner");
  detail::require_same_grid(g, f, "cross_wigner");
  const Axis& ax = g.axes[0];
  auto W = detail::half_step_wigner(ax, [&](std::size_t p, std::size_t q) { return g.values[p] * std::conj(f.values[q]); });
  PhaseSpaceField out({ax}, {LatticeAxis(W.axes[0]), LatticeAxis(W.axes[1])}, FieldKind::wigner);
  out.values = std::move(W.values);
  return out;
}

inline void require_square_time(const SampledFunction& F) {
  if (F.dims() != 2) throw error(errc::dimension_mismatch, "expected a 2-d field");
  if (F.axes[0].tag != SpaceTag::time || F.axes[1].tag != SpaceTag::time)
    throw error(errc::space_tag_mismatch, "kernel axes must be TIME");
  if (!(F.axes[0] == F.axes[1])) throw error(errc::non_square_grid, "kernel grid is not square");
}

/// Wig[F](x, xi) = int F(x + y/2, x - y/2) e^{-i y xi} dy. Only entries (p, q)
/// with p + q even are read.
inline SampledFunction wigner_like(const SampledFunction& F) {
  require_square_time(F);
  const std::size_t n = F.axes[0].n;
  return detail::half_step_wigner(F.axes[0], [&](std::size_t p, std::size_t q) { return F.values[p * n + q]; });
}

/// Checks that a lives on wigner_axes(base) for some base, and returns base.
inline Axis symbol_base(const SampledFunction& a) {
  if (a.dims() != 2) throw error(errc::dimension_mismatch, "symbol must be 2-d");
  if (a.axes[0].tag != SpaceTag::time || a.axes[1].tag != SpaceTag::freq)
    throw error(errc::space_tag_mismatch, "symbol axes must be (TIME, FREQ)");
  if (a.axes[0].n != a.axes[1].n) throw error(errc::non_square_grid, "symbol grid is not square");
  const Axis base = a.axes[0];
  if (!(a.axes[1] == wigner_axes(base)[1]))
    throw error(errc::grid_mismatch, "symbol frequency axis must be FREQ(N, 2L) of its time axis");
  return base;
}

/// Inverse of wigner_like. The result vanishes on entries with p + q odd.
inline SampledFunction wigner_like_inv(const SampledFunction& a) {
  const Axis base = symbol_base(a);
  const std::size_t n = base.n, h = n / 2;
  std::vector<cplx> T = a.values;
  parallel_for(n, [&](std::size_t i) {
    dft_bridge_line(std::span<cplx>(T.data() + i * n, n), a.axes[1].spacing(), Direction::inverse);
  });
  SampledFunction K({base, base});
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p % 2; q < n; q += 2) {
      const std::size_t i = (p + q) / 2;
      const std::size_t m = (p + h) - i;  // (p - q)/2 + h
      K.values[p * n + q] = T[i * n + m];
    }
  return K;
}

// ---------------------------------------------------------------------------
// Cross-ambiguity and the Fourier-Wigner relation

/// A(f, g)(x, xi) = int f(t + x/2) conj(g(t - x/2)) e^{-i t xi} dt, summed
/// directly with nodes t = x_q + x/2 so that both arguments are grid points.
inline PhaseSpaceField cross_ambiguity(const SampledFunction& f, const SampledFunction& g) {
  detail::require_line(f, "cross_ambiguity");
  detail::require_same_grid(f, g, "cross_ambiguity");
  const Axis& ax = f.axes[0];
  const Axis dual = ax.dual();
  const long nn = static_cast<long>(ax.n), h = nn / 2;
  PhaseSpaceField A({ax}, {LatticeAxis(ax), LatticeAxis(dual)}, FieldKind::ambiguity);
  parallel_for(ax.n, [&](std::size_t j) {
    const long shift = static_cast<long>(j) - h;  // x = shift * dx
    const double x = ax.point(j);
    for (std::size_t k = 0; k < ax.n; ++k) {
      const double xi = dual.point(k);
      cplx s{};
      for (long q = std::max(0L, -shift); q < std::min(nn, nn - shift); ++q)
        s += f.values[static_cast<std::size_t>(q + shift)] * std::conj(g.values[static_cast<std::size_t>(q)]) *
             std::polar(1.0, -(ax.point(static_cast<std::size_t>(q)) + 0.5 * x) * xi);
      A.at(j, k) = s * ax.time_step();
    }
  });
  return A;
}

/// e^{(i/2) x xi} V_g f(x, xi) on the full lattice.
inline PhaseSpaceField cross_ambiguity_from_stft(const SampledFunction& f, const SampledFunction& g) {
  PhaseSpaceField V = stft(f, g);
  V.kind = FieldKind::ambiguity;
  for (std::size_t j = 0; j < V.lattice[0].count; ++j)
    for (std::size_t k = 0; k < V.lattice[1].count; ++k)
      V.at(j, k) *= std::polar(1.0, 0.5 * V.lattice[0].point(j) * V.lattice[1].point(k));
  return V;
}

/// Forward transform in both variables of a Wigner-grid field. The output
/// axes are (FREQ(N, L), TIME(N, 2L)).
inline SampledFunction fourier_of_wigner(const PhaseSpaceField& W) {
  SampledFunction F = W.to_sampled();
  F = partial_fourier(std::move(F), 0, Direction::forward);
  return partial_fourier(std::move(F), 1, Direction::forward);
}

/// Pairs (i, j) of fourier_of_wigner with (p, q) of a Wigner field such that
/// (-Xi/2, X/2) at (i, j) is the lattice point (p, q).
struct LatticeCorrespondence {
  std::size_t i, j, p, q;
};

inline std::vector<LatticeCorrespondence> fourier_wigner_correspondence(const Axis& base) {
  const auto W = wigner_axes(base);
  const Axis X = base.dual(), Xi = W[1].dual();
  std::vector<LatticeCorrespondence> out;
  for (std::size_t i = 0; i < X.n; ++i)
    for (std::size_t j = 0; j < Xi.n; ++j) {
      const auto p = W[0].index_of(-0.5 * Xi.point(j));
      const auto q = W[1].index_of(0.5 * X.point(i));
      if (p && q) out.push_back({i, j, *p, *q});
    }
  return out;
}

// ---------------------------------------------------------------------------
// 4-variable STFT of a symbol

inline constexpr std::size_t kFieldBudget = std::size_t{1} << 28;

/// V_Psi a(x, xi, eta, y) = int int a(s, t) conj(Psi(s - x, t - xi)) e^{-i(s eta + t y)} ds dt,
/// with (x, xi) on sub-lattices of a's axes and (eta, y) on sub-lattices of
/// their duals. lattice = {x, xi, eta, y}.
inline PhaseSpaceField symbol_stft4(const SampledFunction& a, const SampledFunction& Psi,
                                    const std::vector<LatticeAxis>& lattice) {
  if (a.dims() != 2) throw error(errc::dimension_mismatch, "symbol_stft4 expects a 2-d symbol");
  detail::require_same_grid(a, Psi, "symbol_stft4");
  if (lattice.size() != 4) throw error(errc::dimension_mismatch, "symbol_stft4 needs four lattice axes");
  if (!(lattice[0].base == a.axes[0]) || !(lattice[1].base == a.axes[1]) || !(lattice[2].base == a.axes[0].dual()) ||
      !(lattice[3].base == a.axes[1].dual()))
    throw error(errc::lattice_incompatible, "outer lattice must sit on the symbol grid and its dual");
  if (detail::all_zero(Psi)) throw error(errc::zero_window, "symbol window is identically zero");
  std::size_t total = 1;
  for (const auto& l : lattice) total *= l.count;
  if (total > kFieldBudget)
    throw error(errc::memory_budget_exceeded, std::to_string(total) + " values exceed the 2^28 budget");

  const std::size_t n0 = a.axes[0].n, n1 = a.axes[1].n;
  const long h0 = static_cast<long>(n0 / 2), h1 = static_cast<long>(n1 / 2);
  PhaseSpaceField V({a.axes[0], a.axes[1]}, lattice, FieldKind::stft4);
  const std::size_t shifts = lattice[0].count * lattice[1].count;
  parallel_for(shifts, [&](std::size_t job) {
    const std::size_t i = job / lattice[1].count, j = job % lattice[1].count;
    const long xi0 = static_cast<long>(lattice[0].base_index(i)), xi1 = static_cast<long>(lattice[1].base_index(j));
    SampledFunction prod(a.axes);
    for (long s = 0; s < static_cast<long>(n0); ++s) {
      const long w0 = s - xi0 + h0;
      if (w0 < 0 || w0 >= static_cast<long>(n0)) continue;
      for (long t = 0; t < static_cast<long>(n1); ++t) {
        const long w1 = t - xi1 + h1;
        if (w1 < 0 || w1 >= static_cast<long>(n1)) continue;
        prod.values[static_cast<std::size_t>(s) * n1 + static_cast<std::size_t>(t)] =
            a.values[static_cast<std::size_t>(s) * n1 + static_cast<std::size_t>(t)] *
            std::conj(Psi.values[static_cast<std::size_t>(w0) * n1 + static_cast<std::size_t>(w1)]);
      }
    }
    // Serial transforms here: the outer loop already owns the workers.
    for (std::size_t r = 0; r < n0; ++r)
      dft_bridge_line(std::span<cplx>(prod.values.data() + r * n1, n1), a.axes[1].spacing(), Direction::forward);
    std::vector<cplx> col(n0);
    for (std::size_t l = 0; l < lattice[3].count; ++l) {
      const std::size_t c = lattice[3].base_index(l);
      for (std::size_t r = 0; r < n0; ++r) col[r] = prod.values[r * n1 + c];
      dft_bridge_line(col, a.axes[0].spacing(), Direction::forward);
      for (std::size_t k = 0; k < lattice[2].count; ++k) V.at(i, j, k, l) = col[lattice[2].base_index(k)];
    }
  });
  return V;
}

/// Stride-s outer lattice through the origin in all four variables.
inline std::vector<LatticeAxis> outer_lattice(const SampledFunction& a, std::size_t stride) {
  if (a.dims() != 2) throw error(errc::dimension_mismatch, "outer_lattice expects a 2-d symbol");
  return {LatticeAxis::centered(a.axes[0], stride), LatticeAxis::centered(a.axes[1], stride),
          LatticeAxis::centered(a.axes[0].dual(), stride), LatticeAxis::centered(a.axes[1].dual(), stride)};
}

}  // namespace tfweyl
