#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "tfweyl/fixtures.hpp"
#include "tfweyl/grid.hpp"

using namespace tfweyl;

namespace {

constexpr double pi = std::numbers::pi;

// O(N^2) quadrature with the same convention, summed directly.
std::vector<cplx> brute_fourier(const SampledFunction& f) {
  const Axis& ax = f.axes[0];
  const Axis dual = ax.dual();
  std::vector<cplx> out(ax.n);
  for (std::size_t k = 0; k < ax.n; ++k) {
    cplx s{};
    for (std::size_t n = 0; n < ax.n; ++n) s += std::polar(1.0, -ax.point(n) * dual.point(k)) * f.values[n];
    out[k] = s * ax.spacing();
  }
  return out;
}

std::vector<FixturePtr> battery() {
  return {Fixture::gaussian(),          Fixture::gaussian(1.5, 0.7, 2.0), Fixture::hermite(0), Fixture::hermite(1),
          Fixture::hermite(2),          Fixture::hermite(3),              Fixture::hermite(7), Fixture::bump(-2.0, 3.0, 2),
          Fixture::gaussian(-3.0, 1.2, -4.0)};
}

const std::vector<Axis> kLine{Axis(128, 12.0)};

}  // namespace

TEST(Axis, GeometryInvariants) {
  const Axis a(128, 12.0);
  EXPECT_DOUBLE_EQ(a.time_step() * 128, 24.0);
  EXPECT_NEAR(a.time_step() * a.freq_step() * 128, 2 * pi, 1e-13);
  EXPECT_DOUBLE_EQ(a.point(0), -12.0);
  EXPECT_DOUBLE_EQ(a.point(64), 0.0);
  const Axis d = a.dual();
  EXPECT_EQ(d.tag, SpaceTag::freq);
  EXPECT_NEAR(d.point(0), -pi / a.time_step(), 1e-13);
  EXPECT_EQ(a.index_of(a.point(17)), 17u);
  EXPECT_FALSE(a.index_of(0.5 * a.time_step()).has_value());
  EXPECT_THROW(Axis(100, 1.0), error);
  EXPECT_THROW(Axis(2, 1.0), error);
  EXPECT_THROW(Axis(64, -1.0), error);
}

TEST(Sample, GaussianValuesAndBoundary) {
  std::vector<std::string> warnings;
  const auto f = sample(Fixture::gaussian(), kLine, &warnings);
  EXPECT_TRUE(warnings.empty());
  EXPECT_FALSE(f.truncated);
  for (std::size_t n = 0; n < 128; ++n) EXPECT_EQ(f.values[n], std::exp(-0.5 * kLine[0].point(n) * kLine[0].point(n)));
  EXPECT_LT(boundary_modulus(f), 1e-14);
  EXPECT_LT(boundary_modulus(sample(Fixture::hermite(3), kLine)), 1e-14);
}

TEST(Sample, ConstantIsTruncatedOnes) {
  const auto one = sample(Fixture::constant(), kLine);
  EXPECT_TRUE(one.truncated);
  for (const auto& v : one.values) EXPECT_EQ(v, cplx(1.0));
  const auto one2 = sample(Fixture::constant(), make_axes(2, 16, 2.0));
  EXPECT_EQ(one2.size(), 256u);
}

TEST(Sample, TensorIsOuterProduct) {
  const auto f = Fixture::gaussian(0.5, 1.0, 1.0), g = Fixture::hermite(2);
  const auto axes = make_axes(2, 32, 6.0);
  const auto t = sample(Fixture::tensor(f, g, true), axes);
  const auto fs = sample(f, {axes[0]}), gs = sample(g, {axes[1]});
  for (std::size_t i = 0; i < 32; ++i)
    for (std::size_t j = 0; j < 32; ++j) EXPECT_EQ(t.at(i, j), fs.values[i] * std::conj(gs.values[j]));
}

TEST(Sample, WarnsOnPoorDecayAndRejectsArity) {
  std::vector<std::string> warnings;
  sample(Fixture::gaussian(0.0, 4.0), {Axis(64, 5.0)}, &warnings);
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_THROW(sample(Fixture::gaussian(), make_axes(2, 16, 2.0)), error);
  EXPECT_THROW(sample(Fixture::chirp_symbol(-1, Fixture::gaussian()), kLine), error);
}

TEST(Fourier, MatchesBruteForceOnAllFixtures) {
  for (const auto& spec : battery()) {
    const auto f = sample(spec, kLine);
    const auto fast = fourier(f);
    EXPECT_EQ(fast.axes[0].tag, SpaceTag::freq);
    EXPECT_LE(relative_max_error(fast.values, brute_fourier(f)), 1e-12) << spec->describe();
  }
}

TEST(Fourier, GaussianClosedForm) {
  const auto g = fourier(sample(Fixture::gaussian(), kLine));
  std::vector<cplx> exact(128);
  for (std::size_t k = 0; k < 128; ++k) {
    const double xi = g.axes[0].point(k);
    exact[k] = std::sqrt(2 * pi) * std::exp(-0.5 * xi * xi);
  }
  EXPECT_LE(relative_max_error(g.values, exact), 1e-10);
}

TEST(Fourier, RoundTripAndLinearity) {
  const auto f = sample(Fixture::hermite(3), kLine), g = sample(Fixture::gaussian(1.0, 0.8, 3.0), kLine);
  EXPECT_LE(relative_max_error(inverse_fourier(fourier(f)).values, f.values), 1e-12);
  const cplx alpha{0.3, -1.2}, beta{2.0, 0.5};
  const auto lhs = fourier(alpha * f + beta * g);
  const auto rhs = alpha * fourier(f) + beta * fourier(g);
  EXPECT_LE(relative_max_error(lhs.values, rhs.values), 1e-13);
}

TEST(Fourier, RejectsWrongTags) {
  const auto f = sample(Fixture::gaussian(), kLine);
  EXPECT_THROW(inverse_fourier(f), error);
  EXPECT_THROW(fourier(fourier(f)), error);
}

TEST(Fourier, ParsevalCarriesTwoPi) {
  for (const auto& spec : battery()) {
    for (const auto& other : {Fixture::gaussian(0.3, 1.1, -1.0), Fixture::hermite(1)}) {
      const auto f = sample(spec, kLine), g = sample(other, kLine);
      const double scale = 2 * pi * l2_norm(f) * l2_norm(g);
      EXPECT_LE(std::abs(inner_product(fourier(f), fourier(g)) - 2 * pi * inner_product(f, g)), 1e-10 * scale)
          << spec->describe();
    }
  }
  const auto axes = make_axes(2, 64, 8.0);
  const auto F = sample(Fixture::tensor(Fixture::hermite(1), Fixture::gaussian(0.5)), axes);
  EXPECT_NEAR(std::real(inner_product(fourier(F), fourier(F))), 4 * pi * pi * std::real(inner_product(F, F)),
              1e-10 * std::real(inner_product(F, F)));
}

TEST(PartialFourier, SeparatesOnTensors) {
  const auto axes = make_axes(2, 64, 8.0);
  const auto f = Fixture::hermite(2), g = Fixture::gaussian(0.5, 1.0, 1.0);
  const auto F = sample(Fixture::tensor(f, g), axes);
  const auto G = partial_fourier(F, 1, Direction::forward);
  EXPECT_EQ(G.axes[0].tag, SpaceTag::time);
  EXPECT_EQ(G.axes[1].tag, SpaceTag::freq);
  const auto fs = sample(f, {axes[0]});
  const auto gh = fourier(sample(g, {axes[1]}));
  std::vector<cplx> expected(G.size());
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 64; ++j) expected[i * 64 + j] = fs.values[i] * gh.values[j];
  EXPECT_LE(relative_max_error(G.values, expected), 1e-13);
  EXPECT_LE(relative_max_error(partial_fourier(G, 1, Direction::inverse).values, F.values), 1e-12);
}

TEST(PartialFourier, MatchesQuadratureAlongFirstAxis) {
  const auto axes = make_axes(2, 32, 6.0);
  const auto F = sample(Fixture::tensor(Fixture::gaussian(1.0, 0.9, 2.0), Fixture::hermite(1)), axes);
  const auto G = partial_fourier(F, 0, Direction::forward);
  const Axis dual = axes[0].dual();
  std::vector<cplx> direct(F.size());
  for (std::size_t k = 0; k < 32; ++k)
    for (std::size_t j = 0; j < 32; ++j) {
      cplx s{};
      for (std::size_t n = 0; n < 32; ++n) s += std::polar(1.0, -axes[0].point(n) * dual.point(k)) * F.at(n, j);
      direct[k * 32 + j] = s * axes[0].time_step();
    }
  EXPECT_LE(relative_max_error(G.values, direct), 1e-12);
}

TEST(PhaseSpaceShift, Properties) {
  const auto f = sample(Fixture::hermite(2), kLine);
  const double dx = kLine[0].time_step(), dxi = kLine[0].freq_step();
  EXPECT_EQ(phase_space_shift(f, 0.0, 0.0).values, f.values);

  const auto g = phase_space_shift(f, 5 * dx, 3 * dxi);
  for (std::size_t n = 5; n < 128; ++n) EXPECT_NEAR(std::abs(g.values[n]), std::abs(f.values[n - 5]), 1e-15);
  for (std::size_t n = 0; n < 128; ++n) {
    const double t = kLine[0].point(n);
    EXPECT_NEAR(std::abs(g.values[n] - std::polar(1.0, 3 * dxi * t) * f.values[(n + 123) % 128]), 0.0, 1e-15);
  }

  // Pi(z1) Pi(z2) f = e^{i theta} Pi(z1 + z2) f
  const auto a = phase_space_shift(phase_space_shift(f, 4 * dx, -2 * dxi), -7 * dx, 5 * dxi);
  const auto b = phase_space_shift(f, -3 * dx, 3 * dxi);
  for (std::size_t n = 0; n < 128; ++n) EXPECT_NEAR(std::abs(a.values[n]), std::abs(b.values[n]), 1e-15);

  EXPECT_THROW(phase_space_shift(f, 0.5 * dx, 0.0), error);
  EXPECT_THROW(phase_space_shift(f, 0.0, 0.3 * dxi), error);
}

TEST(Reflect, InvolutionAndPairing) {
  const auto f = sample(Fixture::gaussian(1.0, 0.6, 2.0), kLine);
  EXPECT_EQ(reflect(reflect(f)).values, f.values);
  const auto r = reflect(f);
  const auto expected = sample(Fixture::reflect(Fixture::gaussian(1.0, 0.6, 2.0)), kLine);
  EXPECT_LE(relative_max_error(r.values, expected.values), 1e-15);
}

TEST(InnerProduct, BasicIdentities) {
  const auto f = sample(Fixture::hermite(3), kLine), g = sample(Fixture::gaussian(0.5, 1.0, 1.5), kLine);
  const cplx ff = inner_product(f, f);
  EXPECT_GE(ff.real(), 0.0);
  EXPECT_EQ(ff.imag(), 0.0);
  EXPECT_NEAR(ff.real(), 1.0, 1e-12);  // normalized Hermite function
  EXPECT_NEAR(std::abs(inner_product(f, g) - std::conj(inner_product(g, f))), 0.0, 1e-15);
  EXPECT_THROW(inner_product(f, sample(Fixture::gaussian(), {Axis(64, 12.0)})), error);
}

TEST(InnerProduct, GaussianOverlap) {
  const auto f = sample(Fixture::gaussian(0.0), kLine), g = sample(Fixture::gaussian(1.0), kLine);
  EXPECT_LE(relative_error(inner_product(f, g), std::sqrt(pi) * std::exp(-0.25)), 1e-10);
}

TEST(Fixture, HermiteOrthonormality) {
  std::vector<SampledFunction> h;
  for (int k = 0; k < 6; ++k) h.push_back(sample(Fixture::hermite(k), kLine));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) EXPECT_NEAR(std::abs(inner_product(h[i], h[j])), i == j ? 1.0 : 0.0, 1e-12);
}

TEST(Fixture, BumpSupportAndDescribe) {
  const auto b = Fixture::bump(1.0, 2.0, 2);
  EXPECT_EQ((*b)(0.99), cplx(0.0));
  EXPECT_EQ((*b)(2.0), cplx(0.0));
  EXPECT_NEAR(std::abs((*b)(1.5)), std::exp(-1.0), 1e-15);
  EXPECT_EQ(b->describe(), "bump(1,2,2)");
  EXPECT_THROW(Fixture::bump(2.0, 1.0), error);
}
