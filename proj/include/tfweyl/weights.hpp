#pragma once

// Weight functions omega: [0, inf) -> [0, inf) of logarithmic and
// sub-exponential growth, the numerical checks of their defining growth,
// integrability and convexity conditions, and Young conjugates of
// phi(s) = omega(e^s).

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tfweyl/error.hpp"

namespace tfweyl {

enum class WeightKind { log1p, power, logpower };

inline const char* to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::log1p: return "log1p";
    case WeightKind::power: return "power";
    case WeightKind::logpower: return "logpower";
  }
  return "?";
}

inline WeightKind weight_kind_from_string(const std::string& s) {
  if (s == "log1p") return WeightKind::log1p;
  if (s == "power") return WeightKind::power;
  if (s == "logpower") return WeightKind::logpower;
  throw error(errc::invalid_argument, "unknown weight kind '" + s + "'");
}

/// Anything with a scalar profile and an analytic bound for the tail of
/// int omega(t)/(1+t^2) beyond T (infinity when the integral diverges).
template <typename W>
concept WeightProfile = requires(const W& w, double t) {
  { w(t) } -> std::convertible_to<double>;
  { w.beta_tail(t) } -> std::convertible_to<double>;
};

/// Closed family of weights:
///   log1p:    c * log(1 + t)
///   power:    c * t^a,            0 < a < 1
///   logpower: c * log(1 + t)^a,   a >= 1
class Weight {
 public:
  Weight(WeightKind kind, double a = 1.0, double c = 1.0) : kind_(kind), a_(a), c_(c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw error(errc::invalid_argument, "weight scale c must be positive");
    if (kind == WeightKind::power && !(a > 0.0 && a < 1.0))
      throw error(errc::invalid_argument, "power weight needs 0 < a < 1");
    if (kind == WeightKind::logpower && !(a >= 1.0))
      throw error(errc::invalid_argument, "logpower weight needs a >= 1");
  }

  static Weight log1p(double c = 1.0) { return Weight(WeightKind::log1p, 1.0, c); }
  static Weight power(double a, double c = 1.0) { return Weight(WeightKind::power, a, c); }
  static Weight logpower(double a, double c = 1.0) { return Weight(WeightKind::logpower, a, c); }

  WeightKind kind() const noexcept { return kind_; }
  double a() const noexcept { return a_; }
  double c() const noexcept { return c_; }

  double operator()(double t) const {
    t = std::abs(t);
    switch (kind_) {
      case WeightKind::log1p: return c_ * std::log1p(t);
      case WeightKind::power: return c_ * std::pow(t, a_);
      case WeightKind::logpower: return c_ * std::pow(std::log1p(t), a_);
    }
    return 0.0;
  }

  /// Radial extension: omega evaluated at the Euclidean norm of v.
  double operator()(std::span<const double> v) const {
    double s = 0.0;
    for (double x : v) s += x * x;
    return (*this)(std::sqrt(s));
  }

  double operator()(double x, double y) const { return (*this)(std::hypot(x, y)); }

  /// Upper bound for int_T^inf omega(t)/(1+t^2) dt, using 1/(1+t^2) < 1/t^2.
  double beta_tail(double T) const {
    switch (kind_) {
      case WeightKind::log1p:
        return c_ * (std::log1p(T) / T + std::log1p(1.0 / T));
      case WeightKind::power:
        return c_ * std::pow(T, a_ - 1.0) / (1.0 - a_);
      case WeightKind::logpower: {
        // t = T/u maps the tail onto (0, 1] with an integrable log singularity at 0.
        auto f = [&](double u) { return std::pow(std::log1p(T / u), a_); };
        return c_ / T * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 20, 1e-12);
      }
    }
    return std::numeric_limits<double>::infinity();
  }

  bool operator==(const Weight&) const = default;

 private:
  WeightKind kind_;
  double a_;
  double c_;
};

struct ConditionReport {
  bool alpha_ok = false;
  double alpha_L = 0.0;  // omega(2t) <= L omega(t) + L on the samples
  bool alpha_prime_ok = false;
  double alpha_prime_max_excess = 0.0;  // max of omega(s+t) - omega(s) - omega(t)
  bool beta_ok = false;
  double beta_integral = 0.0;  // int_1^{t_max} omega(t)/(1+t^2)
  double beta_tail = 0.0;      // analytic bound beyond t_max
  bool gamma_ok = false;
  double gamma_a = 0.0;  // omega(t) >= a + b log(1+t)
  double gamma_b = 0.0;
  bool delta_ok = false;
  double delta_min_second_difference = 0.0;
  double t_max = 0.0;
  std::size_t n_samples = 0;
};

namespace detail {

inline std::vector<double> log_spaced_from_zero(double t_max, std::size_t n) {
  std::vector<double> t(n);
  const double span = std::log1p(t_max);
  for (std::size_t i = 0; i < n; ++i) t[i] = std::expm1(span * static_cast<double>(i) / static_cast<double>(n - 1));
  t.back() = t_max;
  return t;
}

}  // namespace detail

/// Numerical check of the growth/integrability/convexity conditions on
/// log-spaced samples of [0, t_max]. Failures are reported, never thrown.
template <WeightProfile W>
ConditionReport check_conditions(const W& w, double t_max, std::size_t n_samples) {
  if (!(t_max > 1.0) || n_samples < 100)
    throw error(errc::invalid_argument, "check_conditions needs t_max > 1 and n_samples >= 100");
  ConditionReport r;
  r.t_max = t_max;
  r.n_samples = n_samples;
  const auto t = detail::log_spaced_from_zero(t_max, n_samples);

  // (alpha): the witness L is the sampled sup of omega(2t)/(omega(t)+1);
  // it must have settled, i.e. the upper half of the range adds < 1%.
  {
    double lower = 1.0, upper = 1.0;
    for (double s : t) {
      if (s > t_max / 2) break;
      const double ratio = w(2 * s) / (w(s) + 1.0);
      double& bucket = s <= t_max / 4 ? lower : upper;
      bucket = std::max(bucket, ratio);
    }
    r.alpha_L = std::max(lower, upper);
    r.alpha_ok = std::isfinite(r.alpha_L) && upper <= lower * 1.01;
  }

  // (alpha'): all sampled pairs.
  {
    double excess = -std::numeric_limits<double>::infinity();
    for (double s : t)
      for (double u : t) excess = std::max(excess, w(s + u) - w(s) - w(u));
    r.alpha_prime_max_excess = excess;
    r.alpha_prime_ok = excess <= 1e-12;
  }

  // (beta): substitute t = e^u on [1, t_max].
  {
    auto integrand = [&](double u) {
      const double s = std::exp(u);
      return w(s) * s / (1.0 + s * s);
    };
    r.beta_integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, std::log(t_max), 20, 1e-12);
    r.beta_tail = w.beta_tail(t_max);
    r.beta_ok = std::isfinite(r.beta_integral) && std::isfinite(r.beta_tail);
  }

  // (gamma): b = min of omega/log(1+t) over t >= 1, then the best a.
  {
    double b = std::numeric_limits<double>::infinity();
    std::size_t argmin = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] < 1.0) continue;
      const double ratio = w(t[i]) / std::log1p(t[i]);
      if (ratio < b * (1.0 - 1e-12)) {
        b = ratio;
        argmin = i;
      }
    }
    double a = std::numeric_limits<double>::infinity();
    for (double s : t) a = std::min(a, w(s) - b * std::log1p(s));
    r.gamma_a = a;
    r.gamma_b = b;
    r.gamma_ok = b > 1e-12 && argmin + 1 < t.size();
  }

  // (delta): convexity of phi(s) = omega(e^s) on s in [-10, log t_max].
  {
    const std::size_t n = n_samples;
    const double lo = -10.0, hi = std::log(t_max);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    double worst = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double s = lo + h * static_cast<double>(i);
      const double p0 = w(std::exp(s - h)), p1 = w(std::exp(s)), p2 = w(std::exp(s + h));
      worst = std::min(worst, p0 - 2 * p1 + p2);
      scale = std::max(scale, std::abs(p1));
    }
    r.delta_min_second_difference = worst;
    r.delta_ok = worst >= -1e-10 * std::max(1.0, scale);
  }
  return r;
}

struct ConjugateTable {
  std::vector<double> t_grid;
  std::vector<double> values;  // phi*(t) = sup_{s>=0} (s t - phi(s))
  std::vector<double> argmax;  // maximizing s per t
  double s_max = 0.0;
  std::size_t n_s = 0;
};

/// Young conjugate of a convex profile phi on s >= 0. The sup is taken on a
/// log-spaced s-grid, then refined by golden-section search around the
/// discrete argmax. Throws boundary_attained when the sup sits at s_max.
template <typename Phi>
ConjugateTable young_conjugate_of(Phi&& phi, std::span<const double> t_grid, double s_max, std::size_t n_s) {
  if (n_s < 3 || !(s_max > 0.0)) throw error(errc::invalid_argument, "young_conjugate needs n_s >= 3, s_max > 0");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 0.0 || (i > 0 && !(t_grid[i] > t_grid[i - 1])))
      throw error(errc::invalid_argument, "t_grid must be nonnegative and increasing");
  }
  const auto s = detail::log_spaced_from_zero(s_max, n_s);
  std::vector<double> phis(n_s);
  for (std::size_t i = 0; i < n_s; ++i) phis[i] = phi(s[i]);

  ConjugateTable table;
  table.t_grid.assign(t_grid.begin(), t_grid.end());
  table.s_max = s_max;
  table.n_s = n_s;
  for (double t : t_grid) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n_s; ++i)
      if (s[i] * t - phis[i] > s[best] * t - phis[best]) best = i;
    if (best == n_s - 1) throw error(errc::boundary_attained, "sup attained at s_max for t = " + std::to_string(t));

    auto objective = [&](double x) { return x * t - phi(x); };
    double lo = s[best == 0 ? 0 : best - 1], hi = s[best + 1];
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = objective(x1), f2 = objective(x2);
    while (hi - lo > 1e-10 * std::max(1.0, std::abs(hi))) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = objective(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = objective(x1);
      }
    }
    double arg = 0.5 * (lo + hi);
    double val = objective(arg);
    // The constrained maximum may sit at s = 0.
    if (objective(0.0) >= val) {
      arg = 0.0;
      val = objective(0.0);
    }
    if (s[best] * t - phis[best] > val) {
      arg = s[best];
      val = s[best] * t - phis[best];
    }
    table.values.push_back(val);
    table.argmax.push_back(arg);
  }
  return table;
}

inline ConjugateTable young_conjugate(const Weight& w, std::span<const double> t_grid, double s_max, std::size_t n_s) {
  return young_conjugate_of([&](double s) { return w(std::exp(s)); }, t_grid, s_max, n_s);
}

}  // namespace tfweyl
