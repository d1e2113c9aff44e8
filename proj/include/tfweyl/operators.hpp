#pragma once

// Dense operators on 1-d sample grids: Weyl quantization (symbol, kernel,
// matrix), multiplication and convolution, localization operators by direct
// composition and through their Weyl symbol, and spectra.
//
// Matrix convention: (T f)(x_n) = sum_s E(n, s) f(x_s) dx.
//
// K = Wig^{-1}[a] only covers kernel entries (p, q) with p + q even, whose
// midpoints are grid points. weyl_matrix fills the remaining entries from the
// symbol at half-sample midpoints (band-limited interpolation along x), so
// the matrix samples the kernel everywhere. The weak pairing then holds to
// quadrature accuracy, and a rank-one symbol gives a rank-one matrix.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "tfweyl/error.hpp"
#include "tfweyl/fixtures.hpp"
#include "tfweyl/grid.hpp"
#include "tfweyl/parallel.hpp"
#include "tfweyl/transforms.hpp"

namespace tfweyl {

enum class OperatorConvention : std::uint8_t { kernel_times_dx = 0 };

struct OperatorMatrix {
  Axis grid;
  Eigen::MatrixXcd entries;
  OperatorConvention convention = OperatorConvention::kernel_times_dx;

  OperatorMatrix() = default;
  OperatorMatrix(Axis g, Eigen::MatrixXcd e) : grid(g), entries(std::move(e)) {
    if (entries.rows() != static_cast<Eigen::Index>(grid.n) || entries.cols() != entries.rows())
      throw error(errc::dimension_mismatch, "operator matrix does not match its grid");
  }

  std::size_t size() const { return grid.n; }

  SampledFunction apply(const SampledFunction& f) const {
    detail::require_line(f, "operator apply");
    if (!(f.axes[0] == grid)) throw error(errc::grid_mismatch, "operator and function on different grids");
    Eigen::Map<const Eigen::VectorXcd> v(f.values.data(), static_cast<Eigen::Index>(f.size()));
    const Eigen::VectorXcd out = entries * v * grid.time_step();
    return SampledFunction(f.axes, std::vector<cplx>(out.data(), out.data() + out.size()), f.truncated);
  }

  /// The linear map on sample vectors.
  Eigen::MatrixXcd weighted() const { return entries * grid.time_step(); }
};

/// Samples a 2-d fixture on wigner_axes(base).
inline SampledFunction sample_symbol(const Fixture& a, const Axis& base, std::vector<std::string>* warnings = nullptr) {
  return sample(a, wigner_axes(base), warnings);
}
inline SampledFunction sample_symbol(const FixturePtr& a, const Axis& base,
                                     std::vector<std::string>* warnings = nullptr) {
  return sample(*a, wigner_axes(base), warnings);
}

// ---------------------------------------------------------------------------
// Weyl quantization

/// K = Wig^{-1}[a].
inline SampledFunction weyl_kernel(const SampledFunction& a) { return wigner_like_inv(a); }

/// K(x, y) = (2 pi)^{-1} sum_k (dxi/2) e^{i (x - y) xi_k} a((x + y)/2, xi_k),
/// summed directly on same-parity entries.
inline SampledFunction weyl_kernel_explicit(const SampledFunction& a) {
  const Axis base = symbol_base(a);
  const std::size_t n = base.n;
  const Axis& fx = a.axes[1];
  const double w = fx.spacing() / (2.0 * std::numbers::pi);
  SampledFunction K({base, base});
  parallel_for(n, [&](std::size_t p) {
    for (std::size_t q = p % 2; q < n; q += 2) {
      const std::size_t mid = (p + q) / 2;
      const double y = base.point(p) - base.point(q);
      cplx s{};
      for (std::size_t k = 0; k < fx.n; ++k) s += std::polar(1.0, y * fx.point(k)) * a.values[mid * n + k];
      K.values[p * n + q] = s * w;
    }
  });
  return K;
}

/// Inverse map kernel -> symbol.
inline SampledFunction symbol_from_kernel(const SampledFunction& K) { return wigner_like(K); }

namespace detail {

/// Column-wise a(x_i + dx/2, .) by trigonometric interpolation; the Nyquist
/// mode is treated as a cosine and vanishes at half samples.
inline std::vector<cplx> half_sample_rows(const SampledFunction& a) {
  const std::size_t n0 = a.axes[0].n, n1 = a.axes[1].n;
  std::vector<cplx> out(a.values.size());
  parallel_for(n1, [&](std::size_t k) {
    std::vector<cplx> col(n0);
    for (std::size_t i = 0; i < n0; ++i) col[i] = a.values[i * n1 + k];
    auto& plans = FftPlans::instance();
    plans.execute(col, -1);
    for (std::size_t j = 0; j < n0; ++j) {
      if (2 * j == n0) {
        col[j] = 0.0;
        continue;
      }
      const double freq = 2 * j < n0 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n0);
      col[j] *= std::polar(1.0 / static_cast<double>(n0), std::numbers::pi * freq / static_cast<double>(n0));
    }
    plans.execute(col, +1);
    for (std::size_t i = 0; i < n0; ++i) out[i * n1 + k] = col[i];
  });
  return out;
}

}  // namespace detail

/// entries = K on p + q even; on p + q odd the kernel is evaluated at the
/// midpoint x_i + dx/2 with y = (2m + 1) dx.
inline OperatorMatrix weyl_matrix(const SampledFunction& a) {
  const SampledFunction K = weyl_kernel(a);
  const Axis& base = K.axes[0];
  const Axis& fx = a.axes[1];
  const std::size_t n = base.n, h = n / 2;
  std::vector<cplx> T = detail::half_sample_rows(a);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t k = 0; k < n; ++k) T[i * n + k] *= std::polar(1.0, base.time_step() * fx.point(k));
    dft_bridge_line(std::span<cplx>(T.data() + i * n, n), fx.spacing(), Direction::inverse);
  });
  Eigen::MatrixXcd E(n, n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      cplx v;
      if ((p + q) % 2 == 0) {
        v = K.values[p * n + q];
      } else {
        const std::size_t i = (p + q - 1) / 2;
        v = T[i * n + (p + h - 1 - i)];  // m + h with m = (p - q - 1)/2
      }
      E(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = v;
    }
  return OperatorMatrix(base, std::move(E));
}

inline SampledFunction weyl_apply(const SampledFunction& a, const SampledFunction& f) { return weyl_matrix(a).apply(f); }

/// sum a conj(b) (dx dxi/2) over a Wigner-grid field pair.
inline cplx symbol_pairing(const SampledFunction& a, const PhaseSpaceField& W) {
  const Axis base = symbol_base(a);
  if (W.kind != FieldKind::wigner || !(W.base_grid[0] == base))
    throw error(errc::grid_mismatch, "symbol and Wigner field on different grids");
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += a.values[i] * std::conj(W.values[i]);
  return s * a.quadrature_weight();
}

struct PairingCheck {
  cplx lhs;  // <a^w f, g>
  cplx rhs;  // (2 pi)^{-1} <a, Wig(g, f)>
  double relative_difference() const { return relative_error(rhs, lhs); }
};

inline PairingCheck weak_pairing_check(const SampledFunction& a, const SampledFunction& f, const SampledFunction& g) {
  detail::require_same_grid(f, g, "weak_pairing_check");
  PairingCheck r;
  r.lhs = inner_product(weyl_apply(a, f), g);
  r.rhs = symbol_pairing(a, cross_wigner(g, f)) / (2.0 * std::numbers::pi);
  return r;
}

// ---------------------------------------------------------------------------
// Multiplication, convolution, and the distributional Weyl examples

/// Diagonal a1(x_n)/dx, so apply is the pointwise product.
inline OperatorMatrix multiplication_operator(const SampledFunction& a1) {
  detail::require_line(a1, "multiplication_operator");
  const Axis& ax = a1.axes[0];
  Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(ax.n, ax.n);
  for (std::size_t i = 0; i < ax.n; ++i) E(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = a1.values[i] / ax.time_step();
  return OperatorMatrix(ax, std::move(E));
}

/// E(n, s) = b(x_n - x_s), zero when x_n - x_s leaves the grid.
inline OperatorMatrix convolution_operator(const SampledFunction& b) {
  detail::require_line(b, "convolution_operator");
  const Axis& ax = b.axes[0];
  const long nn = static_cast<long>(ax.n), h = nn / 2;
  Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(nn, nn);
  for (long i = 0; i < nn; ++i)
    for (long s = 0; s < nn; ++s) {
      const long d = i - s + h;
      if (d >= 0 && d < nn) E(i, s) = b.values[static_cast<std::size_t>(d)];
    }
  return OperatorMatrix(ax, std::move(E));
}

/// Weyl operator of delta(x) (x) a2(xi): f(t) -> 2 F^{-1}(a2)(2t) f(-t).
/// a2 is sampled on FREQ(N, 2L), the Wigner frequency axis of TIME(N, L).
inline OperatorMatrix op_delta_tensor(const SampledFunction& a2) {
  if (a2.dims() != 1 || a2.axes[0].tag != SpaceTag::freq)
    throw error(errc::space_tag_mismatch, "op_delta_tensor expects a 1-d FREQ function");
  const Axis base(a2.axes[0].n, a2.axes[0].half_extent / 2.0, SpaceTag::time);
  const SampledFunction F = inverse_fourier(a2);  // on TIME(N, 2L): point n is 2 x_n
  const std::size_t n = base.n;
  Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i)
    E(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>((n - i) % n)) = 2.0 * F.values[i] / base.time_step();
  return OperatorMatrix(base, std::move(E));
}

/// Weyl operator of a1(x) (x) delta(xi): f -> (2 pi)^{-1} (Lambda_2 a1 * I f),
/// Lambda_2 a1(t) = a1(t/2). a1 is sampled on TIME(2N, L), whose point n + s
/// is (x_n + x_s)/2.
inline OperatorMatrix op_tensor_delta(const SampledFunction& a1) {
  detail::require_line(a1, "op_tensor_delta");
  const Axis base(a1.axes[0].n / 2, a1.axes[0].half_extent, SpaceTag::time);
  const std::size_t n = base.n;
  Eigen::MatrixXcd E(n, n);
  const double w = 1.0 / (2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = 0; s < n; ++s)
      E(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) = w * a1.values[i + s];
  return OperatorMatrix(base, std::move(E));
}

// ---------------------------------------------------------------------------
// Localization operators

/// L^a f = sum_z a(z) V_psi f(z) Pi(z) gamma dx dxi; a on stft_axes(base).
inline SampledFunction localization_compose(const SampledFunction& a, const SampledFunction& psi,
                                            const SampledFunction& gamma, const SampledFunction& f) {
  detail::require_same_grid(f, psi, "localization_compose");
  detail::require_same_grid(f, gamma, "localization_compose");
  if (a.axes != stft_axes(f.axes[0]))
    throw error(errc::lattice_incompatible, "localization symbol must be sampled on the full STFT lattice");
  PhaseSpaceField V = stft(f, psi);
  for (std::size_t i = 0; i < V.size(); ++i) V.values[i] *= a.values[i];
  return stft_adjoint(V, gamma);
}

inline OperatorMatrix localization_matrix(const SampledFunction& a, const SampledFunction& psi,
                                          const SampledFunction& gamma) {
  detail::require_line(psi, "localization_matrix");
  const Axis& ax = psi.axes[0];
  Eigen::MatrixXcd E(ax.n, ax.n);
  for (std::size_t s = 0; s < ax.n; ++s) {
    SampledFunction e({ax});
    e.values[s] = 1.0;
    const auto col = localization_compose(a, psi, gamma, e);
    for (std::size_t i = 0; i < ax.n; ++i)
      E(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) = col.values[i] / ax.time_step();
  }
  return OperatorMatrix(ax, std::move(E));
}

namespace detail {

inline void fft_2d(std::vector<cplx>& data, std::size_t rows, std::size_t cols, int sign) {
  auto& plans = FftPlans::instance();
  for (std::size_t r = 0; r < rows; ++r) plans.execute(std::span<cplx>(data.data() + r * cols, cols), sign);
  std::vector<cplx> col(rows);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) col[r] = data[r * cols + c];
    plans.execute(col, sign);
    for (std::size_t r = 0; r < rows; ++r) data[r * cols + c] = col[r];
  }
}

/// out(n, k) = scale * sum a(n', k') b(n - n' + n0/2, k - k' + n1/2); linear
/// convolution through a zero-padded (factor 2) DFT product.
inline std::vector<cplx> convolve_same_2d(const std::vector<cplx>& a, const std::vector<cplx>& b, std::size_t n0,
                                          std::size_t n1, double scale) {
  const std::size_t p0 = 2 * n0, p1 = 2 * n1;
  std::vector<cplx> pa(p0 * p1), pb(p0 * p1);
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) {
      pa[i * p1 + j] = a[i * n1 + j];
      pb[i * p1 + j] = b[i * n1 + j];
    }
  fft_2d(pa, p0, p1, -1);
  fft_2d(pb, p0, p1, -1);
  for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
  fft_2d(pa, p0, p1, +1);
  const double norm = scale / static_cast<double>(p0 * p1);
  std::vector<cplx> out(n0 * n1);
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) out[i * n1 + j] = pa[(i + n0 / 2) * p1 + (j + n1 / 2)] * norm;
  return out;
}

}  // namespace detail

/// a * Wig(gamma, psi) on the Wigner grid, a sampled on wigner_axes(base).
inline SampledFunction localization_symbol(const SampledFunction& a, const SampledFunction& psi,
                                           const SampledFunction& gamma) {
  detail::require_line(psi, "localization_symbol");
  detail::require_same_grid(psi, gamma, "localization_symbol");
  if (a.axes != wigner_axes(psi.axes[0]))
    throw error(errc::lattice_incompatible, "symbol must be sampled on the Wigner grid of the windows");
  const PhaseSpaceField W = cross_wigner(gamma, psi);
  SampledFunction out(a.axes, a.truncated);
  out.values = detail::convolve_same_2d(a.values, W.values, a.axes[0].n, a.axes[1].n, a.quadrature_weight());
  return out;
}

/// a * Wig(gamma, psi) = F^{-1}(a_hat . F Wig(gamma, psi)) for a symbol given by
/// its Fourier transform a_hat(X, Xi) on the dual grid (FREQ(N, L), TIME(N, 2L)).
template <typename Multiplier>
  requires std::invocable<Multiplier, double, double>
SampledFunction localization_symbol(Multiplier&& a_hat, const SampledFunction& psi, const SampledFunction& gamma) {
  detail::require_same_grid(psi, gamma, "localization_symbol");
  SampledFunction F = fourier_of_wigner(cross_wigner(gamma, psi));
  const std::size_t n0 = F.axes[0].n, n1 = F.axes[1].n;
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j)
      F.values[i * n1 + j] *= static_cast<cplx>(a_hat(F.axes[0].point(i), F.axes[1].point(j)));
  F = partial_fourier(std::move(F), 0, Direction::inverse);
  return partial_fourier(std::move(F), 1, Direction::inverse);
}

inline OperatorMatrix localization_via_weyl(const SampledFunction& a, const SampledFunction& psi,
                                            const SampledFunction& gamma) {
  return weyl_matrix(localization_symbol(a, psi, gamma));
}

template <typename Multiplier>
  requires std::invocable<Multiplier, double, double>
OperatorMatrix localization_via_weyl(Multiplier&& a_hat, const SampledFunction& psi, const SampledFunction& gamma) {
  return weyl_matrix(localization_symbol(std::forward<Multiplier>(a_hat), psi, gamma));
}

// ---------------------------------------------------------------------------
// Spectra

/// Top-k eigenvalues of the weighted matrix, by decreasing modulus.
inline std::vector<cplx> spectrum(const OperatorMatrix& T, std::size_t k) {
  if (k > T.size()) throw error(errc::invalid_argument, "k exceeds the operator size");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(T.weighted(), false);
  if (solver.info() != Eigen::Success) throw error(errc::convergence_failure, "eigensolver did not converge");
  std::vector<cplx> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  std::stable_sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
  ev.resize(k);
  return ev;
}

}  // namespace tfweyl
