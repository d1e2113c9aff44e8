#pragma once

// Weighted mixed norms of phase-space fields, modulation norms and the
// STFT duality pairing.
//
// A field with 2k lattice axes is split into a shift block (first k axes)
// and a modulation block (last k axes). The weight is omega evaluated at
// the Euclidean norm of all 2k coordinates.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "tfweyl/error.hpp"
#include "tfweyl/grid.hpp"
#include "tfweyl/parallel.hpp"
#include "tfweyl/transforms.hpp"
#include "tfweyl/weights.hpp"

namespace tfweyl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct MixedNormSpec {
  double p = 2.0;
  double q = 2.0;
  double lambda = 0.0;
  Weight weight = Weight::log1p();

  void validate() const {
    if (!(p >= 1.0) || !(q >= 1.0)) throw error(errc::invalid_argument, "mixed norm exponents must be >= 1");
    if (!std::isfinite(lambda)) throw error(errc::invalid_argument, "lambda must be finite");
  }
};

namespace detail {

/// Coordinates of flat index `idx` of a field, in lattice order.
inline void field_point(const PhaseSpaceField& V, std::size_t idx, std::vector<double>& out) {
  out.resize(V.dims());
  for (std::size_t a = V.dims(); a-- > 0;) {
    const std::size_t c = V.lattice[a].count;
    out[a] = V.lattice[a].point(idx % c);
    idx /= c;
  }
}

inline double euclid(const std::vector<double>& z) {
  double s = 0.0;
  for (double v : z) s += v * v;
  return std::sqrt(s);
}

}  // namespace detail

/// ( sum_m ( sum_s |V(s, m)|^p e^{p lambda omega} ds )^{q/p} dm )^{1/q},
/// with lattice maxima for infinite exponents.
inline double mixed_norm(const PhaseSpaceField& V, const MixedNormSpec& spec) {
  spec.validate();
  if (V.dims() == 0 || V.dims() % 2 != 0) throw error(errc::dimension_mismatch, "field needs a shift and a modulation block");
  const std::size_t k = V.dims() / 2;
  std::size_t S = 1, M = 1;
  double ds = 1.0, dm = 1.0;
  for (std::size_t a = 0; a < k; ++a) {
    S *= V.lattice[a].count;
    ds *= V.lattice[a].spacing();
    M *= V.lattice[k + a].count;
    dm *= V.lattice[k + a].spacing();
  }
  const bool p_inf = std::isinf(spec.p), q_inf = std::isinf(spec.q);
  std::vector<double> inner(M);
  parallel_for(M, [&](std::size_t m) {
    std::vector<double> z;
    double acc = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      const std::size_t idx = s * M + m;
      detail::field_point(V, idx, z);
      const double v = std::abs(V.values[idx]) * std::exp(spec.lambda * spec.weight(detail::euclid(z)));
      acc = p_inf ? std::max(acc, v) : acc + std::pow(v, spec.p);
    }
    inner[m] = p_inf ? acc : std::pow(acc * ds, 1.0 / spec.p);
  });
  double outer = 0.0;
  for (double v : inner) outer = q_inf ? std::max(outer, v) : outer + std::pow(v, spec.q);
  return q_inf ? outer : std::pow(outer * dm, 1.0 / spec.q);
}

/// |V_psi f| in the mixed norm, on the full STFT lattice.
inline double modulation_norm(const SampledFunction& f, const SampledFunction& psi, const MixedNormSpec& spec) {
  return mixed_norm(stft(f, psi), spec);
}

/// sum V_psi f conj(V_psi h) dz over the full lattice.
inline cplx duality_pairing(const SampledFunction& f, const SampledFunction& h, const SampledFunction& psi) {
  detail::require_same_grid(f, h, "duality_pairing");
  const PhaseSpaceField Vf = stft(f, psi), Vh = stft(h, psi);
  cplx s{};
  for (std::size_t i = 0; i < Vf.size(); ++i) s += Vf.values[i] * std::conj(Vh.values[i]);
  return s * Vf.cell_measure();
}

}  // namespace tfweyl
