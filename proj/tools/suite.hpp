#pragma once

// Acceptance checks shared by the acceptance runner and `tfweyl identities`.
//
// Each criterion holds literal checks, which decide pass/fail, and optional
// corrected checks that evaluate the same identity with the constant this
// Fourier convention actually produces. Corrected checks never change the
// criterion outcome.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tfweyl/tfweyl.hpp"

namespace tfweyl::suite {

inline constexpr double pi = std::numbers::pi;

struct Check {
  std::string name;
  double lhs = 0.0;  // modulus summary of the left side
  double rhs = 0.0;  // modulus summary of the right side
  double error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct Criterion {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  std::vector<Check> corrected;

  bool pass() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
  double worst_ratio() const {
    double w = 0.0;
    for (const auto& c : checks) w = std::max(w, c.tolerance > 0.0 ? c.error / c.tolerance : c.error);
    return w;
  }
};

struct SuiteConfig {
  std::size_t n = 128;
  double L = 12.0;
  std::size_t diag_n = 64;
  std::uint64_t seed = 5;
  DiagnosticConfig diag{};
};

inline constexpr int kCriteria = 14;

namespace detail {

inline Check make(std::string name, double lhs, double rhs, double err, double tol, std::string note = {}) {
  return {std::move(name), lhs, rhs, err, tol, err <= tol, std::move(note)};
}

inline double max_abs(std::span<const cplx> v) {
  double m = 0.0;
  for (auto z : v) m = std::max(m, std::abs(z));
  return m;
}

inline Check compare(std::string name, std::span<const cplx> lhs, std::span<const cplx> rhs, double tol) {
  return make(std::move(name), max_abs(lhs), max_abs(rhs), relative_max_error(lhs, rhs), tol);
}

inline cplx integrate(const std::function<cplx(double)>& f, double lo, double hi) {
  using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double re = gk::integrate([&](double t) { return f(t).real(); }, lo, hi, 20, 1e-14);
  const double im = gk::integrate([&](double t) { return f(t).imag(); }, lo, hi, 20, 1e-14);
  return {re, im};
}

inline std::vector<cplx> slice(const SampledFunction& f, std::size_t lo, std::size_t hi) {
  return {f.values.begin() + static_cast<long>(lo), f.values.begin() + static_cast<long>(hi)};
}

inline Check verdict_check(const std::string& name, Verdict got, Verdict want) {
  return {name, static_cast<double>(got), static_cast<double>(want), got == want ? 0.0 : 1.0, 0.0, got == want,
          std::string(to_string(got)) + " (expected " + to_string(want) + ")"};
}

}  // namespace detail

class Suite {
 public:
  explicit Suite(SuiteConfig cfg = {}) : cfg_(std::move(cfg)), base_(cfg_.n, cfg_.L) {}

  const SuiteConfig& config() const { return cfg_; }

  Criterion run(int id) const {
    switch (id) {
      case 1: return dft_bridge();
      case 2: return stft_inversion();
      case 3: return moyal();
      case 4: return marginal();
      case 5: return wigner_like_identities();
      case 6: return kernel_two_paths();
      case 7: return weak_pairing();
      case 8: return rank_one();
      case 9: return chirp();
      case 10: return localization();
      case 11: return fourier_wigner();
      case 12: return band_limited();
      case 13: return diagnostics_battery();
      case 14: return determinism();
      default: throw error(errc::invalid_argument, "criteria are numbered 1 to 14");
    }
  }

 private:
  SampledFunction line(const FixturePtr& f) const { return sample(f, {base_}); }
  std::size_t lo() const { return base_.n / 4; }
  std::size_t hi() const { return base_.n - base_.n / 4; }

  Criterion dft_bridge() const {
    Criterion c{1, "DFT bridge vs brute-force quadrature", {}, {}};
    const std::vector<FixturePtr> battery{
        Fixture::gaussian(),          Fixture::gaussian(1.5, 0.7, 2.0), Fixture::hermite(0), Fixture::hermite(1),
        Fixture::hermite(2),          Fixture::hermite(3),              Fixture::hermite(7), Fixture::bump(-2.0, 3.0, 2),
        Fixture::gaussian(-3.0, 1.2, -4.0)};
    const Axis dual = base_.dual();
    for (const auto& spec : battery) {
      const auto f = line(spec);
      std::vector<cplx> brute(base_.n);
      for (std::size_t k = 0; k < base_.n; ++k) {
        cplx s{};
        for (std::size_t m = 0; m < base_.n; ++m) s += std::polar(1.0, -base_.point(m) * dual.point(k)) * f.values[m];
        brute[k] = s * base_.spacing();
      }
      c.checks.push_back(detail::compare("fourier " + spec->describe(), fourier(f).values, brute, 1e-12));
    }
    return c;
  }

  Criterion stft_inversion() const {
    Criterion c{2, "STFT inversion, Gaussian window", {}, {}};
    const auto psi = line(Fixture::gaussian());
    for (const auto& spec : {Fixture::gaussian(), Fixture::gaussian(1.0, 0.8, 2.0), Fixture::hermite(3)}) {
      const auto f = line(spec);
      const auto rec = stft_invert(stft(f, psi), psi, psi);
      c.checks.push_back(detail::make("invert " + spec->describe(), l2_norm(rec), l2_norm(f),
                                      relative_l2_error(rec.values, f.values), 1e-6));
    }
    return c;
  }

  // <Wig(g,f), Wig(k,h)> against s <g,k> conj<f,h> over Hermite orders 0..3;
  // errors are relative to the product of the four norms (all one).
  Check moyal_check(const std::string& name, double s, double tol) const {
    std::vector<SampledFunction> h;
    for (int k = 0; k < 4; ++k) h.push_back(line(Fixture::hermite(k)));
    std::vector<PhaseSpaceField> W;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) W.push_back(cross_wigner(h[a], h[b]));
    double err = 0.0, lhs_w = 0.0, rhs_w = 0.0;
    for (int p = 0; p < 16; ++p)
      for (int q = 0; q < 16; ++q) {
        cplx pair{};
        for (std::size_t i = 0; i < W[p].size(); ++i) pair += W[p].values[i] * std::conj(W[q].values[i]);
        pair *= W[p].cell_measure();
        const cplx want = s * inner_product(h[p / 4], h[q / 4]) * std::conj(inner_product(h[p % 4], h[q % 4]));
        if (std::abs(pair - want) >= err) {
          err = std::abs(pair - want);
          lhs_w = std::abs(pair);
          rhs_w = std::abs(want);
        }
      }
    return detail::make(name, lhs_w, rhs_w, err, tol);
  }

  Criterion moyal() const {
    Criterion c{3, "Moyal formula, Hermite orders 0-3", {}, {}};
    c.checks.push_back(moyal_check("<Wig(g,f),Wig(k,h)> = <g,k> conj<f,h>", 1.0, 1e-8));
    c.corrected.push_back(moyal_check("<Wig(g,f),Wig(k,h)> = 2 pi <g,k> conj<f,h>", 2 * pi, 1e-8));
    return c;
  }

  Criterion marginal() const {
    Criterion c{4, "Wigner marginal", {}, {}};
    const std::vector<std::pair<FixturePtr, FixturePtr>> pairs{
        {Fixture::gaussian(-1.0, 1.1, 2.0), Fixture::hermite(3)},
        {Fixture::hermite(1), Fixture::gaussian(0.5, 0.8, -1.0)}};
    for (const auto& [gs, fs] : pairs) {
      const auto g = line(gs), f = line(fs);
      const auto W = cross_wigner(g, f);
      const double dk = W.lattice[1].spacing();
      std::vector<cplx> got, want;
      for (std::size_t i = lo(); i < hi(); ++i) {
        cplx s{};
        for (std::size_t k = 0; k < base_.n; ++k) s += W.at(i, k) * dk;
        got.push_back(s);
        want.push_back(2 * pi * g.values[i] * std::conj(f.values[i]));
      }
      c.checks.push_back(detail::compare("marginal Wig(" + gs->describe() + "," + fs->describe() + ")", got, want, 1e-6));
    }
    return c;
  }

  Criterion wigner_like_identities() const {
    Criterion c{5, "Wig[f (x) conj g] = Wig(f,g); Wigner-like round trip", {}, {}};
    const auto fs = Fixture::hermite(1), gs = Fixture::gaussian(0.5, 0.8, 1.0);
    const auto F = sample(Fixture::tensor(fs, gs, true), {base_, base_});
    c.checks.push_back(
        detail::compare("tensor identity", wigner_like(F).values, cross_wigner(line(fs), line(gs)).values, 1e-10));
    std::mt19937_64 rng(cfg_.seed);
    std::normal_distribution<double> d;
    SampledFunction K({base_, base_});
    for (std::size_t p = 0; p < base_.n; ++p)
      for (std::size_t q = p % 2; q < base_.n; q += 2) K.values[p * base_.n + q] = {d(rng), d(rng)};
    c.checks.push_back(detail::compare("kernel round trip", wigner_like_inv(wigner_like(K)).values, K.values, 1e-10));
    const auto a = wigner_like(K);
    c.checks.push_back(detail::compare("symbol round trip", wigner_like(wigner_like_inv(a)).values, a.values, 1e-10));
    return c;
  }

  Criterion kernel_two_paths() const {
    Criterion c{6, "Weyl kernel, two paths", {}, {}};
    for (const auto& spec : {Fixture::tensor(Fixture::gaussian(0.5, 1.5, 0.7), Fixture::hermite(2)),
                             Fixture::chirp_symbol(-1, Fixture::gaussian(0.3, 0.8))}) {
      const auto a = sample_symbol(spec, base_);
      c.checks.push_back(
          detail::compare("kernel " + spec->describe(), weyl_kernel(a).values, weyl_kernel_explicit(a).values, 1e-10));
    }
    return c;
  }

  Criterion weak_pairing() const {
    Criterion c{7, "Weak pairing, 3x3x3 battery", {}, {}};
    const std::vector<FixturePtr> symbols{
        Fixture::tensor(Fixture::gaussian(0.3, 1.1, 0.2), Fixture::gaussian(-0.2, 1.3)),
        Fixture::tensor(Fixture::gaussian(-0.5, 2.0, 1.0), Fixture::hermite(2)),
        Fixture::tensor(Fixture::hermite(1), Fixture::gaussian(0.5, 1.5, -0.3))};
    const std::vector<FixturePtr> fs{Fixture::hermite(0), Fixture::hermite(1), Fixture::hermite(2)};
    const std::vector<FixturePtr> gs{Fixture::gaussian(0.5, 1.0, 1.0), Fixture::gaussian(-1.0, 0.8, -0.4),
                                     Fixture::gaussian(0.2, 1.3, 0.6)};
    for (const auto& as : symbols)
      for (const auto& fsp : fs)
        for (const auto& gsp : gs) {
          const auto r = weak_pairing_check(sample_symbol(as, base_), line(fsp), line(gsp));
          c.checks.push_back(detail::make("pairing " + as->describe() + " | " + fsp->describe() + " | " + gsp->describe(),
                                          std::abs(r.lhs), std::abs(r.rhs), r.relative_difference(), 1e-6));
        }
    return c;
  }

  // a = Wig(g, f) acting on h against s conj<f,h> g, error scaled by |g|_inf |h| |f|.
  void rank_one_actions(double s, const std::string& label, std::vector<Check>& out) const {
    const auto g = line(Fixture::gaussian(0.5, 1.0, 1.0)), f = line(Fixture::hermite(2));
    const auto T = weyl_matrix(cross_wigner(g, f).to_sampled());
    for (const auto& spec : {Fixture::hermite(2), Fixture::gaussian(-1.0, 0.8, -0.5), Fixture::hermite(0)}) {
      const auto h = line(spec);
      auto want = g;
      want *= s * std::conj(inner_product(f, h));
      const auto got = T.apply(h);
      double err = 0.0;
      for (std::size_t i = 0; i < base_.n; ++i) err = std::max(err, std::abs(got.values[i] - want.values[i]));
      const double scale = detail::max_abs(g.values) * l2_norm(h) * l2_norm(f);
      out.push_back(detail::make(label + " on " + spec->describe(), detail::max_abs(got.values),
                                 detail::max_abs(want.values), err / scale, 1e-8));
    }
  }

  Criterion rank_one() const {
    Criterion c{8, "Rank-one Weyl operator", {}, {}};
    rank_one_actions(1.0 / (2 * pi), "a^w h = (2 pi)^-1 conj<f,h> g", c.checks);
    rank_one_actions(1.0, "a^w h = conj<f,h> g", c.corrected);
    const auto g = line(Fixture::gaussian(0.5, 1.0, 1.0)), f = line(Fixture::gaussian(0.0, 1.2, 0.5));
    const auto ev = spectrum(weyl_matrix(cross_wigner(g, f).to_sampled()), base_.n);
    std::size_t above = 0;
    for (auto z : ev) above += std::abs(z) > 1e-8 ? 1 : 0;
    c.checks.push_back({"eigenvalues of modulus > 1e-8", static_cast<double>(above), 1.0, above == 1 ? 0.0 : 1.0, 0.0,
                        above == 1, "second largest modulus " + std::to_string(std::abs(ev[1]))});
    const cplx lit = std::conj(inner_product(f, g)) / (2 * pi), fixed = std::conj(inner_product(f, g));
    c.checks.push_back(detail::make("eigenvalue = (2 pi)^-1 conj<f,g>", std::abs(ev[0]), std::abs(lit),
                                    std::abs(ev[0] - lit), 1e-8));
    c.corrected.push_back(detail::make("eigenvalue = conj<f,g>", std::abs(ev[0]), std::abs(fixed),
                                       std::abs(ev[0] - fixed), 1e-8));
    return c;
  }

  Criterion chirp() const {
    Criterion c{9, "Chirp symbol gives a constant output", {}, {}};
    const double center = 0.3, w = 0.8;
    const auto a = sample_symbol(Fixture::chirp_symbol(-1, Fixture::gaussian(center, w)), base_);
    const auto g_fix = Fixture::gaussian(0.2, 1.1, 0.4);
    const auto out = weyl_apply(a, line(g_fix));
    const auto phi_hat = [&](double om) {
      return std::sqrt(2 * pi) * w * std::exp(-0.5 * w * w * om * om) * std::polar(1.0, -om * center);
    };
    const cplx C =
        detail::integrate([&](double s) { return phi_hat(2 * s) * (*g_fix)(s); }, -base_.half_extent, base_.half_extent) /
        (2 * pi);
    cplx mean{};
    for (std::size_t i = lo(); i < hi(); ++i) mean += out.values[i];
    mean /= static_cast<double>(hi() - lo());
    double var = 0.0;
    for (std::size_t i = lo(); i < hi(); ++i) var += std::norm(out.values[i] - mean);
    const double sd = std::sqrt(var / static_cast<double>(hi() - lo()));
    c.checks.push_back(detail::make("coefficient of variation", sd, std::abs(mean), sd / std::abs(mean), 1e-6));
    c.checks.push_back(detail::make("mean = (2 pi)^-1 int phi^(2s) g(s) ds", std::abs(mean), std::abs(C),
                                    relative_error(mean, C), 1e-6));
    return c;
  }

  Criterion localization() const {
    Criterion c{10, "Localization identity and Weyl-symbol path", {}, {}};
    const auto psi = line(Fixture::gaussian()), gamma = line(Fixture::gaussian(0.3, 1.2, 0.2));
    const auto f = line(Fixture::hermite(2));
    const auto out = localization_compose(sample(Fixture::constant(), stft_axes(base_)), psi, gamma, f);
    auto want = f;
    want *= 2 * pi * inner_product(gamma, psi);
    c.checks.push_back(detail::compare("unit symbol = 2 pi <gamma,psi> f", out.values, want.values, 1e-6));
    const auto psi2 = line(Fixture::gaussian()), gamma2 = line(Fixture::gaussian(0.2, 1.3));
    for (const auto& as : {Fixture::tensor(Fixture::gaussian(0.5, 2.0), Fixture::gaussian(-0.5, 2.5)),
                           Fixture::chirp_symbol(-1, Fixture::gaussian(0.0, 1.5))})
      for (const auto& spec : {Fixture::hermite(1), Fixture::gaussian(1.0, 0.8, -1.0)}) {
        const auto h = line(spec);
        const auto direct = localization_compose(sample(as, stft_axes(base_)), psi2, gamma2, h);
        const auto via = localization_via_weyl(sample_symbol(as, base_), psi2, gamma2).apply(h);
        c.checks.push_back(detail::make("compose vs Weyl " + as->describe() + " on " + spec->describe(),
                                        l2_norm(via), l2_norm(direct), relative_l2_error(via.values, direct.values),
                                        1e-4));
      }
    return c;
  }

  Check fourier_wigner_check(const std::string& name, double s) const {
    const auto f = line(Fixture::gaussian(0.5, 0.8, 1.0)), g = line(Fixture::hermite(1));
    const auto lhs = fourier_of_wigner(cross_wigner(f, g));
    const auto rhs = cross_wigner(f, reflect(g));
    std::vector<cplx> a, b;
    for (const auto& p : fourier_wigner_correspondence(base_)) {
      a.push_back(lhs.values[p.i * base_.n + p.j]);
      b.push_back(s * rhs.at(p.p, p.q));
    }
    return detail::compare(name, a, b, 1e-6);
  }

  Criterion fourier_wigner() const {
    Criterion c{11, "Fourier-Wigner relation and cross-ambiguity", {}, {}};
    c.checks.push_back(fourier_wigner_check("F Wig(f,g) = 2 pi^2 Wig(f,Ig)(-Xi/2, X/2)", 2 * pi * pi));
    c.corrected.push_back(fourier_wigner_check("F Wig(f,g) = pi Wig(f,Ig)(-Xi/2, X/2)", pi));
    for (const auto& [fs, gs] : {std::pair{Fixture::gaussian(0.5, 0.9, 1.0), Fixture::hermite(1)},
                                 std::pair{Fixture::hermite(2), Fixture::gaussian(-0.4, 1.2, -0.6)}}) {
      const auto f = line(fs), g = line(gs);
      c.checks.push_back(detail::compare("A(f,g) = e^{i x xi/2} V_g f, " + fs->describe() + "," + gs->describe(),
                                         cross_ambiguity(f, g).values, cross_ambiguity_from_stft(f, g).values, 1e-6));
    }
    return c;
  }

  Criterion band_limited() const {
    Criterion c{12, "Band-limited symbol", {}, {}};
    const double a = 0.5, b = 2.5;
    const auto f = line(Fixture::bump(a, b));
    const auto If = reflect(f);
    const auto W = cross_wigner(f, If);
    const auto F = fourier_of_wigner(W);
    const double half_step = F.axes[1].spacing() / 2;
    const auto inside = [&](double Xi) { return Xi >= -2 * b - half_step && Xi <= -2 * a + half_step; };
    double outside = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < F.axes[0].n; ++i)
      for (std::size_t j = 0; j < F.axes[1].n; ++j) {
        const double m = std::abs(F.at(i, j));
        peak = std::max(peak, m);
        if (!inside(F.axes[1].point(j))) outside = std::max(outside, m);
      }
    c.checks.push_back(detail::make("F Wig(f,If) outside the band", outside, peak, outside / peak, 1e-8));
    const auto smoothed = localization_symbol([&](double, double Xi) { return inside(Xi) ? 1.0 : 0.0; }, If, f);
    c.checks.push_back(detail::compare("a * Wig(f,If) = Wig(f,If)", smoothed.values, W.values, 1e-6));
    return c;
  }

  Criterion diagnostics_battery() const {
    Criterion c{13, "Diagnostics battery and implication chain", {}, {}};
    const Axis base = diagnostic_base(cfg_.diag_n);
    const auto axes = wigner_axes(base);
    const auto Psi = sample(Fixture::tensor(Fixture::gaussian(), Fixture::gaussian()), axes);
    const auto g0 = sample(Fixture::gaussian(), {base});
    const std::vector<std::pair<std::string, SampledFunction>> symbols{
        {"gaussian wigner", cross_wigner(g0, g0).to_sampled()},
        {"unit", sample(Fixture::constant(), axes)},
        {"chirp", sample(Fixture::chirp_symbol(-1, Fixture::gaussian()), axes)}};
    ImplicationCheck chain;
    for (const Weight& w : {Weight::log1p(), Weight::power(0.5)}) {
      const std::string wk = std::string(" [") + to_string(w.kind()) + "]";
      std::map<std::string, std::array<DecayReport, 3>> r;
      for (const auto& [name, a] : symbols) {
        r[name] = {weyl_compactness_test(a, Psi, w, cfg_.diag), convolutor_test(a, Psi, w, cfg_.diag),
                   localization_compactness_test(a, g0, g0, Psi, w, cfg_.diag)};
        check_implications(r[name][0], r[name][1], r[name][2], name + wk, chain);
      }
      c.checks.push_back(detail::verdict_check("weyl gaussian wigner" + wk, r["gaussian wigner"][0].verdict,
                                               Verdict::compact_like));
      c.checks.push_back(detail::verdict_check("weyl unit" + wk, r["unit"][0].verdict, Verdict::continuous_like));
      c.checks.push_back(detail::verdict_check("weyl chirp" + wk, r["chirp"][0].verdict, Verdict::fail));
      const bool conv_ok = r["chirp"][1].verdict != Verdict::fail;
      c.checks.push_back({"convolutor chirp passes" + wk, conv_ok ? 1.0 : 0.0, 1.0, conv_ok ? 0.0 : 1.0, 0.0, conv_ok,
                          to_string(r["chirp"][1].verdict)});
      c.checks.push_back(
          detail::verdict_check("localization chirp" + wk, r["chirp"][2].verdict, Verdict::compact_like));
    }
    std::string note;
    for (const auto& m : chain.messages) note += m + "; ";
    c.checks.push_back({"implication chain violations", static_cast<double>(chain.violations), 0.0,
                        static_cast<double>(chain.violations), 0.0, chain.violations == 0, note});
    return c;
  }

  Criterion determinism() const {
    Criterion c{14, "Deterministic reports", {}, {}};
    const Axis base = diagnostic_base(cfg_.diag_n);
    const auto axes = wigner_axes(base);
    const auto Psi = sample(Fixture::tensor(Fixture::gaussian(), Fixture::gaussian()), axes);
    const auto a = sample(Fixture::chirp_symbol(-1, Fixture::gaussian()), axes);
    const auto once = [&] {
      return io::to_json(weyl_compactness_test(a, Psi, Weight::log1p(), cfg_.diag)).dump() +
             io::to_json(convolutor_test(a, Psi, Weight::power(0.5), cfg_.diag)).dump() +
             io::encode(weyl_matrix(sample_symbol(Fixture::chirp_symbol(-1, Fixture::gaussian()), base_)));
    };
    const std::string first = once(), second = once();
    const bool same = first == second;
    c.checks.push_back({"in-process report bytes", static_cast<double>(first.size()),
                        static_cast<double>(second.size()), same ? 0.0 : 1.0, 0.0, same,
                        io::sha256_hex(first).substr(0, 16)});
    return c;
  }

  SuiteConfig cfg_;
  Axis base_;
};

}  // namespace tfweyl::suite
