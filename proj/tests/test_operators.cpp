#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "tfweyl/fixtures.hpp"
#include "tfweyl/operators.hpp"

using namespace tfweyl;

namespace {

constexpr double pi = std::numbers::pi;
const Axis kBase(128, 12.0);
constexpr std::size_t kLo = 32, kHi = 96;  // interior half

SampledFunction line(const FixturePtr& f) { return sample(f, {kBase}); }

SampledFunction symbol(const std::function<cplx(double, double)>& a) {
  SampledFunction s(wigner_axes(kBase));
  for (std::size_t i = 0; i < kBase.n; ++i)
    for (std::size_t k = 0; k < kBase.n; ++k) s.at(i, k) = a(s.axes[0].point(i), s.axes[1].point(k));
  return s;
}

SampledFunction pointwise(SampledFunction a, const SampledFunction& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a.values[i] *= b.values[i];
  return a;
}

// Rescales s so that its grid quadrature equals one.
SampledFunction unit_mass(SampledFunction s) {
  cplx mass{};
  for (auto v : s.values) mass += v;
  s *= 1.0 / (mass * s.quadrature_weight());
  return s;
}

std::vector<cplx> interior(const SampledFunction& f) {
  return {f.values.begin() + kLo, f.values.begin() + kHi};
}

cplx integrate(const std::function<cplx(double)>& f, double lo, double hi) {
  using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double re = gk::integrate([&](double t) { return f(t).real(); }, lo, hi, 20, 1e-14);
  const double im = gk::integrate([&](double t) { return f(t).imag(); }, lo, hi, 20, 1e-14);
  return {re, im};
}

// (2 pi)^{-1} int e^{i x xi} e^{-xi^2 / (2 s^2)} dxi
double gaussian_inverse_ft(double x, double s) { return s / std::sqrt(2 * pi) * std::exp(-0.5 * s * s * x * x); }

}  // namespace

TEST(WeylKernel, TwoPathsAgree) {
  const auto a = sample_symbol(Fixture::tensor(Fixture::gaussian(0.5, 1.5, 0.7), Fixture::hermite(2)), kBase);
  const auto fast = weyl_kernel(a), slow = weyl_kernel_explicit(a);
  EXPECT_LE(relative_max_error(fast.values, slow.values), 1e-10);
}

TEST(WeylKernel, TwoPathsAgreeOnChirpSymbols) {
  const auto a = sample_symbol(Fixture::chirp_symbol(-1, Fixture::gaussian(0.3, 0.8)), kBase);
  EXPECT_LE(relative_max_error(weyl_kernel(a).values, weyl_kernel_explicit(a).values), 1e-10);
}

TEST(WeylKernel, BijectionOnRepresentableSymbols) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  const std::size_t n = kBase.n;
  SampledFunction K0({kBase, kBase});
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p % 2; q < n; q += 2) K0.values[p * n + q] = {d(rng), d(rng)};
  const auto a = symbol_from_kernel(K0);
  EXPECT_LE(relative_max_error(weyl_kernel(a).values, K0.values), 1e-10);
  EXPECT_LE(relative_max_error(symbol_from_kernel(weyl_kernel(a)).values, a.values), 1e-10);
}

TEST(WeylMatrix, PositionSymbolActsByMultiplication) {
  const auto a1 = [](double x) { return 1.0 + std::exp(-x * x / 8.0); };
  const auto a = symbol([&](double x, double) { return a1(x); });
  const auto f = line(Fixture::gaussian(0.4, 1.0, 0.8));
  auto expected = f;
  for (std::size_t i = 0; i < kBase.n; ++i) expected.values[i] *= a1(kBase.point(i));
  EXPECT_LE(relative_max_error(interior(weyl_apply(a, f)), interior(expected)), 1e-6);
}

TEST(WeylMatrix, UnitSymbolIsIdentity) {
  const auto a = sample_symbol(Fixture::constant(), kBase);
  for (const auto& spec : {Fixture::gaussian(), Fixture::hermite(3), Fixture::gaussian(-1.0, 0.9, 1.0)}) {
    const auto f = line(spec);
    EXPECT_LE(relative_max_error(interior(weyl_apply(a, f)), interior(f)), 1e-6) << spec->describe();
  }
}

TEST(WeylMatrix, CrossWignerSymbolIsRankOne) {
  // <a^w h, k> = (2 pi)^{-1} <Wig(g, f), Wig(k, h)> = <g, k> <h, f>
  const auto g = line(Fixture::gaussian(0.5, 1.0, 1.0)), f = line(Fixture::hermite(2));
  const auto T = weyl_matrix(cross_wigner(g, f).to_sampled());
  for (const auto& spec : {Fixture::hermite(0), Fixture::hermite(2), Fixture::gaussian(-1.0, 0.8, -0.5)}) {
    const auto h = line(spec);
    auto expected = g;
    expected *= inner_product(h, f);
    double err = 0.0, gmax = 0.0;
    const auto out = T.apply(h);
    for (std::size_t i = 0; i < kBase.n; ++i) {
      err = std::max(err, std::abs(out.values[i] - expected.values[i]));
      gmax = std::max(gmax, std::abs(g.values[i]));
    }
    // hermite(0) is orthogonal to f, so the error is scaled by |g|_inf |h| |f|.
    EXPECT_LE(err / (gmax * l2_norm(h) * l2_norm(f)), 1e-8) << spec->describe();
  }
}

TEST(WeylMatrix, ChirpSymbolOutputsAConstant) {
  // a = e^{-2ix xi} phi(xi) gives a^w g = (2 pi)^{-1} int phi_hat(2s) g(s) ds.
  const double c = 0.3, w = 0.8;
  const auto a = sample_symbol(Fixture::chirp_symbol(-1, Fixture::gaussian(c, w)), kBase);
  const auto g_fix = Fixture::gaussian(0.2, 1.1, 0.4);
  const auto out = weyl_apply(a, line(g_fix));
  const auto phi_hat = [&](double om) { return std::sqrt(2 * pi) * w * std::exp(-0.5 * w * w * om * om) * std::polar(1.0, -om * c); };
  const cplx C = integrate([&](double s) { return phi_hat(2 * s) * (*g_fix)(s); }, -12.0, 12.0) / (2 * pi);
  cplx mean{};
  for (std::size_t i = kLo; i < kHi; ++i) mean += out.values[i];
  mean /= static_cast<double>(kHi - kLo);
  double var = 0.0;
  for (std::size_t i = kLo; i < kHi; ++i) var += std::norm(out.values[i] - mean);
  const double sd = std::sqrt(var / static_cast<double>(kHi - kLo));
  EXPECT_LE(sd / std::abs(mean), 1e-6);
  EXPECT_LE(relative_error(mean, C), 1e-6);
}

TEST(WeylMatrix, FrequencySymbolActsByConvolution) {
  const double s = 1.2;
  const auto a = symbol([&](double, double xi) { return std::exp(-0.5 * xi * xi / (s * s)); });
  SampledFunction b({kBase});
  for (std::size_t i = 0; i < kBase.n; ++i) b.values[i] = gaussian_inverse_ft(kBase.point(i), s);
  const auto f = line(Fixture::hermite(1));
  const auto expected = convolution_operator(b).apply(f);
  EXPECT_LE(relative_max_error(interior(weyl_apply(a, f)), interior(expected)), 1e-6);
}

TEST(WeylMatrix, RejectsSymbolsOffTheWignerGrid) {
  const auto a = sample(Fixture::constant(), stft_axes(kBase));
  EXPECT_THROW(weyl_matrix(a), error);
}

TEST(WeakPairing, AgreesAcrossBattery) {
  // Off-center fixtures keep every pairing away from parity zeros.
  const std::vector<FixturePtr> symbols{
      Fixture::tensor(Fixture::gaussian(0.3, 1.1, 0.2), Fixture::gaussian(-0.2, 1.3)),
      Fixture::tensor(Fixture::gaussian(-0.5, 2.0, 1.0), Fixture::hermite(2)),
      Fixture::tensor(Fixture::hermite(1), Fixture::gaussian(0.5, 1.5, -0.3)),
  };
  const std::vector<FixturePtr> fs{Fixture::hermite(0), Fixture::hermite(1), Fixture::hermite(2)};
  const std::vector<FixturePtr> gs{Fixture::gaussian(0.5, 1.0, 1.0), Fixture::gaussian(-1.0, 0.8, -0.4),
                                   Fixture::gaussian(0.2, 1.3, 0.6)};
  for (const auto& as : symbols)
    for (const auto& fsp : fs)
      for (const auto& gsp : gs) {
        const auto r = weak_pairing_check(sample_symbol(as, kBase), line(fsp), line(gsp));
        EXPECT_LE(r.relative_difference(), 1e-6) << as->describe() << " " << fsp->describe() << " " << gsp->describe();
      }
}

TEST(WeakPairing, UnitSymbolGivesTheInnerProduct) {
  const auto f = line(Fixture::hermite(1)), g = line(Fixture::gaussian(0.5, 1.0, 0.7));
  const auto r = weak_pairing_check(sample_symbol(Fixture::constant(), kBase), f, g);
  EXPECT_LE(relative_error(r.rhs, inner_product(f, g)), 1e-10);
  EXPECT_LE(r.relative_difference(), 1e-6);
}

TEST(WeakPairing, WignerSymbolFollowsMoyal) {
  const auto g0 = line(Fixture::hermite(1)), f0 = line(Fixture::gaussian(0.3, 1.2));
  const auto f = line(Fixture::gaussian(0.0, 0.9, 0.5)), g = line(Fixture::hermite(1));
  const auto r = weak_pairing_check(cross_wigner(g0, f0).to_sampled(), f, g);
  const cplx expected = inner_product(g0, g) * std::conj(inner_product(f0, f));
  EXPECT_LE(relative_error(r.rhs, expected), 1e-8);
  EXPECT_LE(r.relative_difference(), 1e-6);
}

TEST(Multiplication, UnitIsIdentityAndProductIsPointwise) {
  const auto f = line(Fixture::hermite(2));
  EXPECT_LE(relative_max_error(multiplication_operator(line(Fixture::constant())).apply(f).values, f.values), 1e-14);
  const auto a = line(Fixture::gaussian(1.0, 2.0, 0.3));
  const auto expected = pointwise(a, f);
  EXPECT_LE(relative_max_error(multiplication_operator(a).apply(f).values, expected.values), 1e-14);
}

TEST(Convolution, MatchesTheConvolutionTheorem) {
  const auto b = line(Fixture::gaussian(0.5, 0.8, 1.0)), f = line(Fixture::hermite(3));
  // Zero-pad to twice the extent so the circular product is linear.
  const Axis wide(2 * kBase.n, 2 * kBase.half_extent);
  SampledFunction bp({wide}), fp({wide});
  for (std::size_t i = 0; i < kBase.n; ++i) {
    bp.values[i + kBase.n / 2] = b.values[i];
    fp.values[i + kBase.n / 2] = f.values[i];
  }
  const auto prod = pointwise(fourier(bp), fourier(fp));
  const auto conv = inverse_fourier(prod);
  std::vector<cplx> expected(conv.values.begin() + kBase.n / 2, conv.values.begin() + 3 * kBase.n / 2);
  EXPECT_LE(relative_max_error(convolution_operator(b).apply(f).values, expected), 1e-8);
}

TEST(DistributionalSymbols, DeltaTensorMatchesItsFormula) {
  const double s = 1.2;
  SampledFunction a2({wigner_axes(kBase)[1]});
  for (std::size_t k = 0; k < kBase.n; ++k) a2.values[k] = std::exp(-0.5 * std::pow(a2.axes[0].point(k) / s, 2));
  const auto f_fix = Fixture::gaussian(0.4, 1.0, 0.3);
  const auto out = op_delta_tensor(a2).apply(line(f_fix));
  std::vector<cplx> expected;
  for (std::size_t i = kLo; i < kHi; ++i) {
    const double t = kBase.point(i);
    expected.push_back(2.0 * gaussian_inverse_ft(2 * t, s) * (*f_fix)(-t));
  }
  EXPECT_LE(relative_max_error(interior(out), expected), 1e-8);
}

TEST(DistributionalSymbols, TensorDeltaMatchesItsFormula) {
  const auto a1_fix = Fixture::gaussian(0.2, 1.5, 0.4);
  const auto a1 = sample(a1_fix, {Axis(2 * kBase.n, kBase.half_extent)});
  const auto f_fix = Fixture::hermite(1);
  const auto out = op_tensor_delta(a1).apply(line(f_fix));
  std::vector<cplx> expected;
  for (std::size_t i = kLo; i < kHi; ++i) {
    const double t = kBase.point(i);
    expected.push_back(integrate([&](double u) { return (*a1_fix)((t + u) / 2) * (*f_fix)(u); }, -12.0, 12.0) / (2 * pi));
  }
  EXPECT_LE(relative_max_error(interior(out), expected), 1e-8);
}

TEST(DistributionalSymbols, NarrowGaussianInPositionApproachesDeltaTensor) {
  const double s = 1.2;
  SampledFunction a2({wigner_axes(kBase)[1]});
  for (std::size_t k = 0; k < kBase.n; ++k) a2.values[k] = std::exp(-0.5 * std::pow(a2.axes[0].point(k) / s, 2));
  const auto f = line(Fixture::gaussian(0.4, 1.0, 0.3));
  const auto limit = op_delta_tensor(a2).apply(f);
  std::vector<double> errs;
  for (double eps : {0.4, 0.2, 0.1}) {
    // The xi factor is a2 itself, so unit mass is taken in x alone.
    auto a = unit_mass(symbol([&](double x, double) { return std::exp(-0.5 * x * x / (eps * eps)); }));
    a *= a.axes[1].spacing() * static_cast<double>(kBase.n);
    for (std::size_t i = 0; i < kBase.n; ++i)
      for (std::size_t k = 0; k < kBase.n; ++k) a.at(i, k) *= a2.values[k];
    errs.push_back(relative_l2_error(weyl_apply(a, f).values, limit.values));
  }
  EXPECT_LT(errs[1], errs[0]);
  EXPECT_LT(errs[2], errs[1]);
  EXPECT_LT(errs[2], errs[0] / 2);
}

TEST(DistributionalSymbols, NarrowGaussianInFrequencyApproachesTensorDelta) {
  const auto a1_fix = Fixture::gaussian(0.2, 1.5, 0.4);
  const auto f = line(Fixture::hermite(1));
  const auto limit = op_tensor_delta(sample(a1_fix, {Axis(2 * kBase.n, kBase.half_extent)})).apply(f);
  std::vector<double> errs;
  for (double eps : {0.4, 0.2, 0.1}) {
    auto a = unit_mass(symbol([&](double, double xi) { return std::exp(-0.5 * xi * xi / (eps * eps)); }));
    a *= 2.0 * kBase.half_extent;
    for (std::size_t i = 0; i < kBase.n; ++i)
      for (std::size_t k = 0; k < kBase.n; ++k) a.at(i, k) *= (*a1_fix)(kBase.point(i));
    errs.push_back(relative_l2_error(weyl_apply(a, f).values, limit.values));
  }
  EXPECT_LT(errs[1], errs[0]);
  EXPECT_LT(errs[2], errs[1]);
  EXPECT_LT(errs[2], errs[0] / 2);
}

TEST(Localization, UnitSymbolScalesByWindowOverlap) {
  const auto psi = line(Fixture::gaussian()), gamma = line(Fixture::gaussian(0.3, 1.2, 0.2));
  const auto f = line(Fixture::hermite(2));
  const auto out = localization_compose(sample(Fixture::constant(), stft_axes(kBase)), psi, gamma, f);
  auto expected = f;
  expected *= 2 * pi * inner_product(gamma, psi);
  EXPECT_LE(relative_max_error(out.values, expected.values), 1e-6);
}

TEST(Localization, NonnegativeSymbolGivesNonnegativeForm) {
  const auto psi = line(Fixture::gaussian());
  const auto a = sample(Fixture::tensor(Fixture::gaussian(0.5, 3.0), Fixture::gaussian(-1.0, 2.0)), stft_axes(kBase));
  for (const auto& spec : {Fixture::hermite(0), Fixture::hermite(3), Fixture::gaussian(2.0, 0.7, 1.5)}) {
    const auto f = line(spec);
    const cplx form = inner_product(localization_compose(a, psi, psi, f), f);
    const auto V = stft(f, psi);
    double q = 0.0;
    for (std::size_t i = 0; i < V.size(); ++i) q += a.values[i].real() * std::norm(V.values[i]);
    q *= V.cell_measure();
    EXPECT_GE(form.real(), 0.0);
    EXPECT_LE(std::abs(form - q), 1e-12 * q) << spec->describe();
  }
}

TEST(Localization, CompositionMatchesWeylSymbolPath) {
  const auto psi = line(Fixture::gaussian()), gamma = line(Fixture::gaussian(0.2, 1.3));
  const std::vector<FixturePtr> symbols{
      Fixture::tensor(Fixture::gaussian(0.5, 2.0), Fixture::gaussian(-0.5, 2.5)),
      Fixture::chirp_symbol(-1, Fixture::gaussian(0.0, 1.5)),
  };
  for (const auto& as : symbols)
    for (const auto& spec : {Fixture::hermite(1), Fixture::gaussian(1.0, 0.8, -1.0)}) {
      const auto f = line(spec);
      const auto direct = localization_compose(sample(as, stft_axes(kBase)), psi, gamma, f);
      const auto via = localization_via_weyl(sample_symbol(as, kBase), psi, gamma).apply(f);
      EXPECT_LE(relative_l2_error(via.values, direct.values), 1e-4) << as->describe() << " " << spec->describe();
    }
}

TEST(Localization, MatrixReproducesComposition) {
  const auto psi = line(Fixture::gaussian());
  const auto a = sample(Fixture::tensor(Fixture::gaussian(0.0, 2.0), Fixture::gaussian(0.0, 2.0)), stft_axes(kBase));
  const auto f = line(Fixture::hermite(2));
  EXPECT_LE(relative_max_error(localization_matrix(a, psi, psi).apply(f).values,
                               localization_compose(a, psi, psi, f).values),
            1e-12);
}

TEST(Localization, RejectsSymbolOffTheStftLattice) {
  const auto psi = line(Fixture::gaussian());
  try {
    localization_compose(sample_symbol(Fixture::constant(), kBase), psi, psi, psi);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::lattice_incompatible);
  }
}

TEST(BandLimited, FourierWignerVanishesOutsideTheReflectedBand) {
  const double lo = 0.5, hi = 2.5;
  const auto f = line(Fixture::bump(lo, hi));
  const auto F = fourier_of_wigner(cross_wigner(f, reflect(f)));
  const double half_step = F.axes[1].spacing() / 2;
  double outside = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < F.axes[0].n; ++i)
    for (std::size_t j = 0; j < F.axes[1].n; ++j) {
      const double m = std::abs(F.at(i, j)), Xi = F.axes[1].point(j);
      peak = std::max(peak, m);
      if (Xi < -2 * hi - half_step || Xi > -2 * lo + half_step) outside = std::max(outside, m);
    }
  EXPECT_GT(peak, 0.0);
  EXPECT_LE(outside / peak, 1e-8);
}

TEST(BandLimited, IndicatorMultiplierFixesTheWigner) {
  const double lo = 0.5, hi = 2.5;
  const auto f = line(Fixture::bump(lo, hi));
  const auto If = reflect(f);
  const double half_step = fourier_of_wigner(cross_wigner(f, If)).axes[1].spacing() / 2;
  const auto a_hat = [&](double, double Xi) { return (Xi >= -2 * hi - half_step && Xi <= -2 * lo + half_step) ? 1.0 : 0.0; };
  const auto smoothed = localization_symbol(a_hat, If, f);
  EXPECT_LE(relative_max_error(smoothed.values, cross_wigner(f, If).values), 1e-6);
}

TEST(Mollifier, NarrowSymbolsConvergeToTheWindowWigner) {
  const auto psi = line(Fixture::gaussian()), gamma = line(Fixture::hermite(1));
  const auto W = cross_wigner(gamma, psi);
  std::vector<double> errs;
  for (double eps : {0.8, 0.4, 0.2}) {
    const auto a = unit_mass(sample_symbol(Fixture::tensor(Fixture::gaussian(0.0, eps), Fixture::gaussian(0.0, eps)), kBase));
    errs.push_back(relative_max_error(localization_symbol(a, psi, gamma).values, W.values));
  }
  EXPECT_LT(errs[1], errs[0]);
  EXPECT_LT(errs[2], errs[1]);
  EXPECT_LT(errs[2], errs[0] / 4);
}

TEST(Spectrum, IdentityHasUnitEigenvalues) {
  const auto ev = spectrum(multiplication_operator(line(Fixture::constant())), kBase.n);
  for (auto z : ev) EXPECT_LE(std::abs(z - 1.0), 1e-8);
}

TEST(Spectrum, RankOneWeylHasOneEigenvalue) {
  const auto g = line(Fixture::gaussian(0.5, 1.0, 1.0)), f = line(Fixture::gaussian(0.0, 1.2, 0.5));
  const auto ev = spectrum(weyl_matrix(cross_wigner(g, f).to_sampled()), 6);
  EXPECT_LE(std::abs(ev[0] - inner_product(g, f)), 1e-8);
  for (std::size_t i = 1; i < ev.size(); ++i) EXPECT_LE(std::abs(ev[i]), 1e-8) << i;
}

TEST(Spectrum, GaussianMaskLocalizationIsPositiveAndDecreasing) {
  const auto psi = line(Fixture::gaussian());
  const auto a = sample(Fixture::tensor(Fixture::gaussian(0.0, 2.5), Fixture::gaussian(0.0, 2.5)), stft_axes(kBase));
  const auto ev = spectrum(localization_matrix(a, psi, psi), 10);
  for (std::size_t i = 0; i < ev.size(); ++i) {
    EXPECT_LE(std::abs(ev[i].imag()), 1e-10 * std::abs(ev[0]));
    EXPECT_GT(ev[i].real(), 0.0);
    if (i > 0) EXPECT_LT(ev[i].real(), ev[i - 1].real());
  }
}

TEST(Spectrum, RejectsOversizedRequest) {
  EXPECT_THROW(spectrum(multiplication_operator(line(Fixture::constant())), kBase.n + 1), error);
}
