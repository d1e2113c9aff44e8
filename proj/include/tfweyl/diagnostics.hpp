#pragma once

// Finite-grid decay diagnostics for multipliers, convolutors, Weyl symbols
// and localization symbols.
//
// Every test sweeps S(l, m) = max_z |V(z)| e^{l A(z) - m B(z)} over an outer
// parameter list l and an inner grid m, where V is an STFT field and A, B
// are weight values at test-specific points. A cell is boundary-flagged when
// the maximum over the outermost lattice ring exceeds the interior maximum
// by more than boundary_ratio, and stable when it is not flagged and
// removing the ring changes S by at most ring_tolerance. mu_star(l) is the
// least stable m.
//
// Input axes whose edge slices carry more than 1e-8 of the peak modulus are
// truncated; the matching shift axes are measured on their interior half.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "tfweyl/error.hpp"
#include "tfweyl/fixtures.hpp"
#include "tfweyl/grid.hpp"
#include "tfweyl/operators.hpp"
#include "tfweyl/parallel.hpp"
#include "tfweyl/transforms.hpp"
#include "tfweyl/weights.hpp"

namespace tfweyl {

enum class Verdict : std::uint8_t { compact_like, continuous_like, fail };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::compact_like: return "COMPACT_LIKE";
    case Verdict::continuous_like: return "CONTINUOUS_LIKE";
    case Verdict::fail: return "FAIL";
  }
  return "?";
}

struct HeuristicParams {
  double boundary_ratio = 1.01;
  double ring_tolerance = 0.01;
  double compact_slack = 0.25;  // in units of the inner grid step
};

struct DiagnosticConfig {
  std::vector<double> lambda_list{0.5, 1.0, 2.0, 4.0};
  std::vector<double> mu_grid = default_mu_grid();
  HeuristicParams params{};
  std::size_t stride = 4;

  static std::vector<double> default_mu_grid(double mu_max = 16.0, double mu_step = 0.5) {
    if (!(mu_step > 0.0) || !(mu_max >= 0.0)) throw error(errc::invalid_argument, "mu grid needs mu_step > 0, mu_max >= 0");
    std::vector<double> g;
    const auto n = static_cast<std::size_t>(std::floor(mu_max / mu_step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) g.push_back(static_cast<double>(i) * mu_step);
    return g;
  }

  void validate() const {
    if (lambda_list.empty() || mu_grid.size() < 2) throw error(errc::invalid_argument, "empty lambda list or mu grid");
    for (std::size_t i = 1; i < lambda_list.size(); ++i)
      if (!(lambda_list[i] > lambda_list[i - 1])) throw error(errc::invalid_argument, "lambda list must increase");
    for (std::size_t i = 1; i < mu_grid.size(); ++i)
      if (!(mu_grid[i] > mu_grid[i - 1])) throw error(errc::invalid_argument, "mu grid must increase");
    if (lambda_list.front() <= 0.0) throw error(errc::invalid_argument, "lambda list must be positive");
  }
};

struct DecayReport {
  std::string test;
  std::string weight;
  std::string outer_role = "lambda", inner_role = "mu";
  std::vector<double> lambda_list, mu_grid;
  std::vector<double> sup_values;             // lambda-major
  std::vector<std::uint8_t> boundary_flags;   // lambda-major
  std::vector<std::uint8_t> stable;           // lambda-major
  std::vector<double> mu_star;                // NaN when no stable mu
  bool decay_probe_used = false;
  bool decay_probe_ok = false;
  std::vector<std::uint8_t> interior_axes;  // per input axis
  Verdict verdict = Verdict::fail;
  HeuristicParams params{};

  double sup(std::size_t l, std::size_t m) const { return sup_values[l * mu_grid.size() + m]; }
  bool flagged(std::size_t l, std::size_t m) const { return boundary_flags[l * mu_grid.size() + m] != 0; }
};

/// The verdict as a function of the recorded data only.
inline Verdict derive_verdict(const DecayReport& r) {
  for (double m : r.mu_star)
    if (std::isnan(m)) return Verdict::fail;
  const auto [lo, hi] = std::minmax_element(r.mu_star.begin(), r.mu_star.end());
  const double step = r.mu_grid[1] - r.mu_grid[0];
  const bool flat = *hi - *lo <= r.params.compact_slack * step;
  if (flat && (!r.decay_probe_used || r.decay_probe_ok)) return Verdict::compact_like;
  return Verdict::continuous_like;
}

namespace detail {

/// Per-point data of a field restricted to a measurement box.
struct WeightedPoints {
  std::vector<double> log_mag;
  std::vector<std::uint8_t> on_ring;
  std::vector<std::vector<double>> coords;  // lattice coordinates per point
};

/// Per axis of F: does the modulus on the first or last slice exceed
/// 1e-8 of the peak?
inline std::vector<std::uint8_t> truncated_axes(const SampledFunction& F) {
  double peak = 0.0;
  for (auto v : F.values) peak = std::max(peak, std::abs(v));
  std::vector<std::uint8_t> out(F.dims(), 0);
  std::size_t inner = F.size();
  for (std::size_t a = 0; a < F.dims(); ++a) {
    const std::size_t n = F.axes[a].n;
    inner /= n;
    double edge = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) {
      const std::size_t k = (i / inner) % n;
      if (k == 0 || k + 1 == n) edge = std::max(edge, std::abs(F.values[i]));
    }
    out[a] = edge > 1e-8 * peak ? 1 : 0;
  }
  return out;
}

/// Restricts shift axis a to its interior half when interior[a] is set;
/// ring membership is relative to the resulting box.
inline WeightedPoints measurement_points(const PhaseSpaceField& V, const std::vector<std::uint8_t>& interior) {
  const std::size_t d = V.dims();
  std::vector<std::size_t> lo(d, 0), hi(d);
  for (std::size_t a = 0; a < d; ++a) {
    hi[a] = V.lattice[a].count;
    if (a < interior.size() && interior[a]) {
      lo[a] = hi[a] / 4;
      hi[a] = hi[a] - hi[a] / 4;
    }
    if (hi[a] - lo[a] < 3) throw error(errc::inconclusive_grid, "lattice too small to separate a boundary ring");
  }
  WeightedPoints w;
  std::vector<std::size_t> idx(d);
  for (std::size_t flat = 0; flat < V.size(); ++flat) {
    std::size_t rest = flat;
    bool inside = true, ring = false;
    for (std::size_t a = d; a-- > 0;) {
      idx[a] = rest % V.lattice[a].count;
      rest /= V.lattice[a].count;
      if (idx[a] < lo[a] || idx[a] >= hi[a]) inside = false;
      if (idx[a] == lo[a] || idx[a] + 1 == hi[a]) ring = true;
    }
    if (!inside) continue;
    std::vector<double> z(d);
    for (std::size_t a = 0; a < d; ++a) z[a] = V.lattice[a].point(idx[a]);
    const double m = std::abs(V.values[flat]);
    w.log_mag.push_back(m > 0.0 ? std::log(m) : -std::numeric_limits<double>::infinity());
    w.on_ring.push_back(ring ? 1 : 0);
    w.coords.push_back(std::move(z));
  }
  return w;
}

struct CellResult {
  double log_sup;
  bool flagged;
  bool stable;
};

inline CellResult evaluate_cell(const WeightedPoints& w, const std::vector<double>& A, const std::vector<double>& B,
                                double l, double m, const HeuristicParams& hp) {
  const double ninf = -std::numeric_limits<double>::infinity();
  double ring = ninf, inner = ninf;
  for (std::size_t i = 0; i < w.log_mag.size(); ++i) {
    const double v = w.log_mag[i] + l * A[i] - m * B[i];
    if (w.on_ring[i]) ring = std::max(ring, v);
    else inner = std::max(inner, v);
  }
  const double all = std::max(ring, inner);
  const bool flagged = ring > inner + std::log(hp.boundary_ratio);
  const bool stable = !flagged && inner >= all + std::log1p(-hp.ring_tolerance);
  return {all, flagged, stable};
}

/// Fills sup values, flags and mu_star from precomputed exponents.
inline void sweep(DecayReport& r, const WeightedPoints& w, const std::vector<double>& A, const std::vector<double>& B) {
  const std::size_t nl = r.lambda_list.size(), nm = r.mu_grid.size();
  r.sup_values.assign(nl * nm, 0.0);
  r.boundary_flags.assign(nl * nm, 0);
  r.stable.assign(nl * nm, 0);
  parallel_for(nl * nm, [&](std::size_t cell) {
    const auto c = evaluate_cell(w, A, B, r.lambda_list[cell / nm], r.mu_grid[cell % nm], r.params);
    r.sup_values[cell] = std::exp(c.log_sup);
    r.boundary_flags[cell] = c.flagged ? 1 : 0;
    r.stable[cell] = c.stable ? 1 : 0;
  });
  r.mu_star.assign(nl, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t l = 0; l < nl; ++l)
    for (std::size_t m = 0; m < nm; ++m)
      if (r.stable[l * nm + m]) {
        r.mu_star[l] = r.mu_grid[m];
        break;
      }
}

/// Stability of |V| e^{l omega(|z|)} for every l: decay in all variables.
inline bool decay_probe(const WeightedPoints& w, const Weight& omega, const std::vector<double>& lambdas,
                        const HeuristicParams& hp) {
  std::vector<double> A(w.log_mag.size()), zero(w.log_mag.size(), 0.0);
  for (std::size_t i = 0; i < A.size(); ++i) {
    double s = 0.0;
    for (double c : w.coords[i]) s += c * c;
    A[i] = omega(std::sqrt(s));
  }
  for (double l : lambdas)
    if (!evaluate_cell(w, A, zero, l, 0.0, hp).stable) return false;
  return true;
}

inline double block_norm(const std::vector<double>& z, std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t a = from; a < to; ++a) s += z[a] * z[a];
  return std::sqrt(s);
}

inline DecayReport start_report(const char* test, const Weight& w, const DiagnosticConfig& cfg,
                                std::vector<std::uint8_t> interior) {
  cfg.validate();
  DecayReport r;
  r.test = test;
  r.weight = std::string(to_string(w.kind())) + "(a=" + std::to_string(w.a()) + ",c=" + std::to_string(w.c()) + ")";
  r.lambda_list = cfg.lambda_list;
  r.mu_grid = cfg.mu_grid;
  r.params = cfg.params;
  r.interior_axes = std::move(interior);
  return r;
}

/// STFT of a 1-d function or symbol_stft4 of a 2-d function.
inline PhaseSpaceField analysis_field(const SampledFunction& F, const SampledFunction& window, std::size_t stride) {
  if (F.dims() == 1) return stft(F, window, stride);
  if (F.dims() == 2) return symbol_stft4(F, window, outer_lattice(F, stride));
  throw error(errc::dimension_mismatch, "diagnostics take 1-d or 2-d inputs");
}

/// Shared body of the multiplier and convolutor tests. The positive
/// exponent is omega of the modulation block when `positive_on_modulation`.
inline DecayReport dual_decay_test(const char* name, const SampledFunction& F, const SampledFunction& window,
                                   const Weight& w, const DiagnosticConfig& cfg, bool positive_on_modulation) {
  DecayReport r = start_report(name, w, cfg, truncated_axes(F));
  if (!positive_on_modulation) {
    r.outer_role = "mu";
    r.inner_role = "lambda";
  }
  const PhaseSpaceField V = analysis_field(F, window, cfg.stride);
  const std::size_t k = V.dims() / 2;
  const WeightedPoints pts = measurement_points(V, r.interior_axes);
  std::vector<double> A(pts.log_mag.size()), B(pts.log_mag.size());
  for (std::size_t i = 0; i < A.size(); ++i) {
    const double shift = w(block_norm(pts.coords[i], 0, k)), mod = w(block_norm(pts.coords[i], k, 2 * k));
    A[i] = positive_on_modulation ? mod : shift;
    B[i] = positive_on_modulation ? shift : mod;
  }
  sweep(r, pts, A, B);
  r.decay_probe_used = true;
  r.decay_probe_ok = decay_probe(pts, w, cfg.lambda_list, cfg.params);
  r.verdict = derive_verdict(r);
  return r;
}

}  // namespace detail

/// |V_psi F(x, xi)| e^{lambda omega(xi) - mu omega(x)}: for every lambda
/// some mu. COMPACT_LIKE additionally requires decay in all variables.
inline DecayReport multiplier_test(const SampledFunction& F, const SampledFunction& window, const Weight& w,
                                   const DiagnosticConfig& cfg = {}) {
  return detail::dual_decay_test("multiplier", F, window, w, cfg, true);
}

/// |V_psi a(x, xi)| e^{mu omega(x) - lambda omega(xi)}: for every mu some
/// lambda. The outer list plays mu, the inner grid plays lambda.
inline DecayReport convolutor_test(const SampledFunction& a, const SampledFunction& window, const Weight& w,
                                   const DiagnosticConfig& cfg = {}) {
  return detail::dual_decay_test("convolutor", a, window, w, cfg, false);
}

/// |V_Psi a(x, xi, eta, y)| e^{lambda omega(x - y/2, xi + eta/2)}
///   e^{-mu omega(x + y/2, -xi + eta/2)} on the outer lattice.
inline DecayReport weyl_compactness_test(const SampledFunction& a, const SampledFunction& Psi, const Weight& w,
                                         const DiagnosticConfig& cfg = {}) {
  if (a.dims() != 2) throw error(errc::dimension_mismatch, "weyl_compactness_test expects a 2-d symbol");
  DecayReport r = detail::start_report("weyl", w, cfg, detail::truncated_axes(a));
  const PhaseSpaceField V = symbol_stft4(a, Psi, outer_lattice(a, cfg.stride));
  const auto pts = detail::measurement_points(V, r.interior_axes);
  std::vector<double> A(pts.log_mag.size()), B(pts.log_mag.size());
  for (std::size_t i = 0; i < A.size(); ++i) {
    const auto& z = pts.coords[i];
    const double x = z[0], xi = z[1], eta = z[2], y = z[3];
    A[i] = w(std::hypot(x - y / 2, xi + eta / 2));
    B[i] = w(std::hypot(x + y / 2, -xi + eta / 2));
  }
  detail::sweep(r, pts, A, B);
  r.verdict = derive_verdict(r);
  return r;
}

/// Weyl test of a * Wig(gamma, psi), with a on wigner_axes of the windows.
inline DecayReport localization_compactness_test(const SampledFunction& a, const SampledFunction& psi,
                                                 const SampledFunction& gamma, const SampledFunction& Psi,
                                                 const Weight& w, const DiagnosticConfig& cfg = {}) {
  DecayReport r = weyl_compactness_test(localization_symbol(a, psi, gamma), Psi, w, cfg);
  r.test = "localization";
  return r;
}

/// Same, for a symbol given by its Fourier transform a_hat(X, Xi).
template <typename Multiplier>
  requires std::invocable<Multiplier, double, double>
DecayReport localization_compactness_test(Multiplier&& a_hat, const SampledFunction& psi, const SampledFunction& gamma,
                                          const SampledFunction& Psi, const Weight& w,
                                          const DiagnosticConfig& cfg = {}) {
  DecayReport r = weyl_compactness_test(localization_symbol(std::forward<Multiplier>(a_hat), psi, gamma), Psi, w, cfg);
  r.test = "localization";
  return r;
}

// ---------------------------------------------------------------------------
// Implication chain

struct ImplicationCheck {
  std::size_t violations = 0;
  std::vector<std::string> messages;
};

/// weyl COMPACT_LIKE => convolutor passes => localization COMPACT_LIKE.
inline void check_implications(const DecayReport& weyl, const DecayReport& conv, const DecayReport& loc,
                               const std::string& label, ImplicationCheck& out) {
  if (weyl.verdict == Verdict::compact_like && conv.verdict == Verdict::fail) {
    ++out.violations;
    out.messages.push_back(label + ": compact Weyl symbol is not a convolutor");
  }
  if (conv.verdict != Verdict::fail && loc.verdict != Verdict::compact_like) {
    ++out.violations;
    out.messages.push_back(label + ": convolutor symbol gives a non-compact localization operator");
  }
}

// ---------------------------------------------------------------------------
// Tail condition

struct TailReport {
  std::vector<double> radius;
  std::vector<double> tail;  // t(r); NaN for empty shells
  bool monotone_outer_half = false;
  bool small_end = false;
  bool pass = false;
};

/// t(r) = max over r <= |z| < r + dr of sup_{|eta| <= R} |V_psi a(z, eta)|
/// e^{lambda omega(z)}, with z the shift block of the 4-d field.
inline TailReport tail_test(const SampledFunction& a, const SampledFunction& Psi, const Weight& w, double lambda,
                            double R, std::size_t stride = 4) {
  if (a.dims() != 2) throw error(errc::dimension_mismatch, "tail_test expects a 2-d symbol");
  if (!(lambda >= 0.0) || !(R > 0.0)) throw error(errc::invalid_argument, "tail_test needs lambda >= 0 and R > 0");
  const PhaseSpaceField V = symbol_stft4(a, Psi, outer_lattice(a, stride));
  const auto pts = detail::measurement_points(V, detail::truncated_axes(a));
  const double dr = std::max(V.lattice[0].spacing(), V.lattice[1].spacing());
  double r_max = 0.0;
  for (const auto& z : pts.coords) r_max = std::max(r_max, detail::block_norm(z, 0, 2));
  const auto shells = static_cast<std::size_t>(std::floor(r_max / dr)) + 1;
  TailReport t;
  t.tail.assign(shells, -std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < shells; ++s) t.radius.push_back(static_cast<double>(s) * dr);
  for (std::size_t i = 0; i < pts.log_mag.size(); ++i) {
    const auto& z = pts.coords[i];
    if (detail::block_norm(z, 2, 4) > R) continue;
    const double r = detail::block_norm(z, 0, 2);
    const auto s = std::min(shells - 1, static_cast<std::size_t>(std::floor(r / dr)));
    t.tail[s] = std::max(t.tail[s], pts.log_mag[i] + lambda * w(r));
  }
  for (double& v : t.tail) v = std::isinf(v) ? std::numeric_limits<double>::quiet_NaN() : std::exp(v);
  std::vector<double> seen;
  for (std::size_t s = shells / 2; s < shells; ++s)
    if (!std::isnan(t.tail[s])) seen.push_back(t.tail[s]);
  t.monotone_outer_half = !seen.empty();
  for (std::size_t i = 1; i < seen.size(); ++i)
    if (seen[i] > seen[i - 1]) t.monotone_outer_half = false;
  const double first = t.tail.front();
  t.small_end = !seen.empty() && !std::isnan(first) && seen.back() <= 1e-6 * first;
  t.pass = t.monotone_outer_half && t.small_end;
  return t;
}

// ---------------------------------------------------------------------------
// Standard setting

/// Wigner grid with equal spacing on both axes: L^2 = pi N / 4.
inline Axis diagnostic_base(std::size_t n = 64) {
  return Axis(n, std::sqrt(std::numbers::pi * static_cast<double>(n) / 4.0));
}

}  // namespace tfweyl
