#pragma once

// Analytic test functions. A Fixture can be evaluated anywhere, which lets
// oracles and symbol constructions sample it on grids of their choosing.

#include <cmath>
#include <complex>
#include <cstdio>
#include <memory>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "tfweyl/error.hpp"
#include "tfweyl/grid.hpp"

namespace tfweyl {

class Fixture;
using FixturePtr = std::shared_ptr<const Fixture>;

namespace fixture {

/// exp(-(t - center)^2 / (2 width^2)) * exp(i modulation t)
struct Gaussian {
  double center = 0.0, width = 1.0, modulation = 0.0;
};
/// Normalized Hermite function h_n(t) = (2^n n! sqrt(pi))^{-1/2} H_n(t) e^{-t^2/2}
struct Hermite {
  int order = 0;
};
/// a(x, xi) = exp(sign * 2i x xi) factor(xi)
struct ChirpSymbol {
  int sign = -1;
  FixturePtr factor;
};
/// exp(-1 / (1 - u^2)^smoothness) for u = (2t - a - b)/(b - a) in (-1, 1), else 0.
struct Bump {
  double a = 0.0, b = 1.0;
  int smoothness = 1;
};
struct Constant {
  cplx value{1.0, 0.0};
};
/// exp(coefficient * t^2); grows for positive coefficients.
struct ExpQuadratic {
  double coefficient = 1.0;
};
/// f1(x) * f2(y), with f2 optionally conjugated.
struct Tensor {
  FixturePtr first, second;
  bool conjugate_second = false;
};
/// f(-t)
struct Reflect {
  FixturePtr inner;
};

}  // namespace fixture

class Fixture {
 public:
  using Variant = std::variant<fixture::Gaussian, fixture::Hermite, fixture::ChirpSymbol, fixture::Bump,
                               fixture::Constant, fixture::ExpQuadratic, fixture::Tensor, fixture::Reflect>;

  explicit Fixture(Variant v) : v_(std::move(v)) {}

  static FixturePtr gaussian(double center = 0.0, double width = 1.0, double modulation = 0.0) {
    return std::make_shared<Fixture>(fixture::Gaussian{center, width, modulation});
  }
  static FixturePtr hermite(int order) { return std::make_shared<Fixture>(fixture::Hermite{order}); }
  static FixturePtr chirp_symbol(int sign, FixturePtr factor) {
    if (!factor || factor->arity() > 1) throw error(errc::dimension_mismatch, "chirp factor must be 1-d");
    return std::make_shared<Fixture>(fixture::ChirpSymbol{sign, std::move(factor)});
  }
  static FixturePtr bump(double a, double b, int smoothness = 1) {
    if (!(b > a) || smoothness < 1) throw error(errc::invalid_argument, "bump needs a < b and smoothness >= 1");
    return std::make_shared<Fixture>(fixture::Bump{a, b, smoothness});
  }
  static FixturePtr constant(cplx value = 1.0) { return std::make_shared<Fixture>(fixture::Constant{value}); }
  static FixturePtr exp_quadratic(double coefficient) {
    return std::make_shared<Fixture>(fixture::ExpQuadratic{coefficient});
  }
  static FixturePtr tensor(FixturePtr f1, FixturePtr f2, bool conjugate_second = false) {
    if (!f1 || !f2 || f1->arity() > 1 || f2->arity() > 1)
      throw error(errc::dimension_mismatch, "tensor factors must be 1-d");
    return std::make_shared<Fixture>(fixture::Tensor{std::move(f1), std::move(f2), conjugate_second});
  }
  static FixturePtr reflect(FixturePtr f) {
    if (!f || f->arity() > 1) throw error(errc::dimension_mismatch, "reflect expects a 1-d fixture");
    return std::make_shared<Fixture>(fixture::Reflect{std::move(f)});
  }

  const Variant& variant() const { return v_; }

  int arity() const {
    return std::visit(
        [](const auto& f) -> int {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, fixture::ChirpSymbol> || std::is_same_v<T, fixture::Tensor>) return 2;
          else if constexpr (std::is_same_v<T, fixture::Constant>) return 0;  // any dimension
          else return 1;
        },
        v_);
  }

  /// Decaying fixtures are expected to vanish at the grid boundary.
  bool decays() const {
    return std::visit(
        [](const auto& f) -> bool {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, fixture::Gaussian> || std::is_same_v<T, fixture::Hermite> ||
                        std::is_same_v<T, fixture::Bump>)
            return true;
          else if constexpr (std::is_same_v<T, fixture::Tensor>) return f.first->decays() && f.second->decays();
          else if constexpr (std::is_same_v<T, fixture::Reflect>) return f.inner->decays();
          else return false;
        },
        v_);
  }

  cplx operator()(double t) const {
    return std::visit(
        [t](const auto& f) -> cplx {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, fixture::Gaussian>) {
            const double u = (t - f.center) / f.width;
            return std::exp(-0.5 * u * u) * std::polar(1.0, f.modulation * t);
          } else if constexpr (std::is_same_v<T, fixture::Hermite>) {
            return hermite_function(f.order, t);
          } else if constexpr (std::is_same_v<T, fixture::Bump>) {
            const double u = (2.0 * t - f.a - f.b) / (f.b - f.a);
            if (std::abs(u) >= 1.0) return 0.0;
            return std::exp(-1.0 / std::pow(1.0 - u * u, f.smoothness));
          } else if constexpr (std::is_same_v<T, fixture::Constant>) {
            return f.value;
          } else if constexpr (std::is_same_v<T, fixture::ExpQuadratic>) {
            return std::exp(f.coefficient * t * t);
          } else if constexpr (std::is_same_v<T, fixture::Reflect>) {
            return (*f.inner)(-t);
          } else {
            throw error(errc::dimension_mismatch, "2-d fixture evaluated at a scalar");
          }
        },
        v_);
  }

  cplx operator()(double x, double y) const {
    return std::visit(
        [x, y](const auto& f) -> cplx {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, fixture::ChirpSymbol>) {
            return std::polar(1.0, 2.0 * f.sign * x * y) * (*f.factor)(y);
          } else if constexpr (std::is_same_v<T, fixture::Tensor>) {
            const cplx second = (*f.second)(y);
            return (*f.first)(x) * (f.conjugate_second ? std::conj(second) : second);
          } else if constexpr (std::is_same_v<T, fixture::Constant>) {
            return f.value;
          } else {
            throw error(errc::dimension_mismatch, "1-d fixture evaluated at a pair");
          }
        },
        v_);
  }

  std::string describe() const {
    return std::visit(
        [](const auto& f) -> std::string {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, fixture::Gaussian>)
            return "gaussian(" + num(f.center) + "," + num(f.width) + "," + num(f.modulation) + ")";
          else if constexpr (std::is_same_v<T, fixture::Hermite>) return "hermite(" + std::to_string(f.order) + ")";
          else if constexpr (std::is_same_v<T, fixture::ChirpSymbol>)
            return "chirp(" + std::to_string(f.sign) + "," + f.factor->describe() + ")";
          else if constexpr (std::is_same_v<T, fixture::Bump>)
            return "bump(" + num(f.a) + "," + num(f.b) + "," + std::to_string(f.smoothness) + ")";
          else if constexpr (std::is_same_v<T, fixture::Constant>)
            return "constant(" + num(f.value.real()) + "," + num(f.value.imag()) + ")";
          else if constexpr (std::is_same_v<T, fixture::ExpQuadratic>) return "exp_quadratic(" + num(f.coefficient) + ")";
          else if constexpr (std::is_same_v<T, fixture::Tensor>)
            return "tensor(" + f.first->describe() + "," + (f.conjugate_second ? "conj " : "") + f.second->describe() +
                   ")";
          else return "reflect(" + f.inner->describe() + ")";
        },
        v_);
  }

  static cplx hermite_function(int order, double t) {
    // Stable three-term recurrence for the normalized functions.
    double h0 = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * t * t);
    if (order == 0) return h0;
    double h1 = std::sqrt(2.0) * t * h0;
    for (int k = 2; k <= order; ++k) {
      const double h2 = std::sqrt(2.0 / k) * t * h1 - std::sqrt((k - 1.0) / k) * h0;
      h0 = h1;
      h1 = h2;
    }
    return h1;
  }

 private:
  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  Variant v_;
};

/// Largest modulus on the outermost sample ring.
inline double boundary_modulus(const SampledFunction& f) {
  double m = 0.0;
  if (f.dims() == 1) return std::max(std::abs(f.values.front()), std::abs(f.values.back()));
  if (f.dims() == 2) {
    const std::size_t n0 = f.axes[0].n, n1 = f.axes[1].n;
    for (std::size_t i = 0; i < n0; ++i)
      for (std::size_t j = 0; j < n1; ++j)
        if (i == 0 || j == 0 || i + 1 == n0 || j + 1 == n1) m = std::max(m, std::abs(f.at(i, j)));
  }
  return m;
}

/// Pointwise evaluation of a fixture on a 1-d or 2-d grid. Decaying
/// fixtures that exceed 1e-10 at the boundary append a warning.
inline SampledFunction sample(const Fixture& spec, const std::vector<Axis>& axes,
                              std::vector<std::string>* warnings = nullptr) {
  if (spec.arity() != 0 && static_cast<std::size_t>(spec.arity()) != axes.size())
    throw error(errc::dimension_mismatch, "fixture arity " + std::to_string(spec.arity()) + " vs grid dims " +
                                              std::to_string(axes.size()));
  SampledFunction f(axes, !spec.decays());
  if (axes.size() == 1) {
    for (std::size_t i = 0; i < axes[0].n; ++i) f.values[i] = spec(axes[0].point(i));
  } else {
    for (std::size_t i = 0; i < axes[0].n; ++i)
      for (std::size_t j = 0; j < axes[1].n; ++j) f.at(i, j) = spec(axes[0].point(i), axes[1].point(j));
  }
  if (warnings && spec.decays()) {
    const double b = boundary_modulus(f);
    if (b > 1e-10) warnings->push_back(spec.describe() + ": boundary modulus " + std::to_string(b));
  }
  return f;
}

inline SampledFunction sample(const FixturePtr& spec, const std::vector<Axis>& axes,
                              std::vector<std::string>* warnings = nullptr) {
  return sample(*spec, axes, warnings);
}

}  // namespace tfweyl
