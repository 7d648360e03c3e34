#pragma once

// Built-in invariant checks. The quick level runs closed-form identities;
// the full level adds oracle comparisons and the property suites.

#include <chrono>
#include <cmath>
#include <complex>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "diskrad/field.hpp"
#include "diskrad/linesource.hpp"
#include "diskrad/modal.hpp"
#include "diskrad/profile.hpp"
#include "diskrad/quadrature.hpp"
#include "diskrad/randomfield.hpp"
#include "diskrad/specfun.hpp"

namespace diskrad::selftest {

enum class Level { quick, full };

struct Check {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;  // worst deviation found, or the exception text
  double seconds = 0.0;
};

struct Report {
  Level level = Level::quick;
  std::vector<Check> checks;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  bool suite_passed(const std::string& suite) const {
    bool any = false;
    for (const auto& c : checks)
      if (c.suite == suite) {
        any = true;
        if (!c.passed) return false;
      }
    return any;
  }
};

namespace detail {

/// Tracks the worst |got - want| / scale over a check.
class Worst {
 public:
  explicit Worst(double limit) : limit_(limit) {}
  void add(complex got, complex want, double scale = 1.0) {
    const double d = std::abs(got - want) / scale;
    if (!(d <= worst_)) worst_ = d;  // NaN propagates as a failure
  }
  void add_rel(complex got, complex want) {
    add(got, want, std::max(std::abs(want), 1e-300));
  }
  bool ok() const { return worst_ <= limit_; }
  std::string str() const {
    std::ostringstream os;
    os.precision(3);
    os << "worst " << worst_ << " (limit " << limit_ << ")";
    return os.str();
  }

 private:
  double limit_;
  double worst_ = 0.0;
};

using Body = std::function<std::pair<bool, std::string>()>;

inline void run(Report& rep, const std::string& suite, const std::string& name, Body body) {
  Check c;
  c.suite = suite;
  c.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto [ok, detail] = body();
    c.passed = ok;
    c.detail = std::move(detail);
  } catch (const std::exception& e) {
    c.passed = false;
    c.detail = std::string("exception: ") + e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.checks.push_back(std::move(c));
}

inline std::pair<bool, std::string> verdict(const Worst& w) { return {w.ok(), w.str()}; }

template <class F>
bool throws(F&& f) {
  try {
    f();
  } catch (const std::exception&) {
    return true;
  }
  return false;
}

// --- quick ------------------------------------------------------------------

inline void quick_checks(Report& rep) {
  run(rep, "specfun", "closed-form values", [] {
    Worst w(1e-14);
    w.add(bessel_j(0, 0.0), 1.0);
    w.add(bessel_j(Order::half(0), pi / 2), 2.0 / pi);
    w.add(hankel1(Order::half(0), pi / 2), complex(2.0 / pi, 0.0));
    w.add(hankel1(Order::half(0), pi), complex(0.0, std::sqrt(2.0) / pi));
    w.add(bessel_i(0, 0.0), 1.0);
    w.add(bessel_i(3, 0.0), 0.0);
    w.add(chebyshev_u(0, 0.37), 1.0);
    w.add(chebyshev_u(1, 0.3), 0.6);
    w.add(assoc_legendre(0, 0, 0.0), 1.0);
    w.add(assoc_legendre(2, 0, 0.0), -0.5);
    w.add(double_factorial(-1), 1.0);
    w.add(double_factorial(0), 1.0);
    w.add(double_factorial(7), 105.0);
    w.add(reciprocal_gamma(1.0), 1.0);
    w.add(reciprocal_gamma(0.0), 0.0);
    w.add(reciprocal_gamma(-0.5), -1.0 / (2.0 * std::sqrt(pi)));
    return verdict(w);
  });
  run(rep, "specfun", "domain errors", [] {
    const bool ok = throws([] { bessel_j(0, -1.0); }) && throws([] { hankel1(Order::half(0), 0.0); }) &&
                    throws([] { chebyshev_u(2, 1.5); }) && throws([] { double_factorial(-2); }) &&
                    throws([] { bessel_i(0, -1.0); });
    return std::pair{ok, std::string(ok ? "all raised" : "missing domain error")};
  });
  run(rep, "quadrature", "elementary integrals", [] {
    Worst w(1e-12);
    w.add(integrate_1d([](double x) { return std::sin(x); }, 0.0, pi).value, 2.0);
    const complex I(0.0, 1.0);
    w.add(integrate_1d([&](double x) { return std::exp(5.0 * I * x); }, 0.0, 1.0).value,
          (std::exp(5.0 * I) - 1.0) / (5.0 * I));
    w.add(integrate_1d([](double s) { return chebyshev_u(4, s) * std::sqrt(1 - s * s); }, -1.0, 1.0)
              .value,
          0.0);
    w.add(integrate_2d([](double a, double) { return a; }, Rect{0.0, 1.0, 0.0, 2 * pi}).value, pi);
    const auto one = chebyshev2_nodes(1);
    w.add(one[0].node, 0.0);
    w.add(one[0].weight, pi / 2);
    double sum = 0.0;
    for (const auto& nd : chebyshev2_nodes(17)) sum += nd.weight;
    w.add(sum, pi / 2);
    return verdict(w);
  });
  run(rep, "linesource", "static and in-plane limits", [] {
    Worst w(1e-10);
    w.add(lq_quadrature(0, 0.0, Observer(2.0, 0.0)), pi / 2);
    w.add(lq_inplane_exact(0, 0.0, 1.5), pi / 2);
    w.add(lq_inplane_exact(3, 0.0, 1.5), 0.0);
    w.add(lq_auto(2, 3.0, Observer(1.3, 0.0)).value, lq_inplane_exact(2, 3.0, 1.3));
    const bool raised = throws([] { lq_farfield(2, 2.0, Observer(1.5, 1e7)); }) &&
                        throws([] { Observer(0.9, 0.0); });
    return std::pair{w.ok() && raised, w.str()};
  });
  run(rep, "modal", "polynomial and system entries", [] {
    Worst w(1e-14);
    for (int q = 0; q < 6; ++q)
      w.add_rel(e_poly(0, q, 1.7), 1.0 / (std::pow(2.0, q + 1) * std::tgamma(q + 2.0)));
    w.add_rel(e_poly(1, 0, 1.25), 0.625);
    w.add_rel(v_poly(0, 0, 0.3), 4 * 0.3 / pi);
    w.add_rel(w_poly(0, 0, 0.3), 2 * 0.3 / pi);
    w.add(t_weight(0, 1.25, 0.0, 0), 0.0);
    w.add(t_weight(3, 1.25, 0.6, 2), 0.0);
    const auto zero = line_source_coeffs(2, 1.25, 10, RadialProfile::constant(0.0));
    for (const auto& u : zero.u) w.add(u, 0.0);
    const auto sys = build_system(3, 1.25, 9, RadialProfile::monomial(1.0));
    for (int v = 1; v <= 9; v += 2)
      if (v / 2 < 3) w.add(sys.B[v], 0.0);
    return verdict(w);
  });
  run(rep, "field", "ring limits and self-cancellation", [] {
    Worst w(1e-13);
    const Observer o(2.0, 1.0);
    w.add(ring_field_quadrature(0, 1.5, 0.0, o), std::exp(complex(0.0, 1.5 * o.R())) / (2 * o.R()));
    w.add(ring_field_quadrature(1, 1.5, 0.0, o), 0.0);
    const auto p = RadialProfile::monomial(2.0);
    const auto c = line_source_coeffs(2, 1.25, 11, p);
    w.add(cancel_scale(c, c), 1.0);
    const TonalSource s(2, p, 1.0);
    w.add(cancel_field(s, s, 1.0, Observer(1.25, 0.5)), 0.0);
    w.add(field_direct(TonalSource(1, RadialProfile::constant(0.0), 2.0), o), 0.0);
    return verdict(w);
  });
  run(rep, "randomfield", "series and kernel limits", [] {
    Worst w(1e-14);
    w.add(wm_series(0, 0.0), 0.0);
    w.add(wm_series(3, 0.0), 0.0);
    w.add(vm(0, 0.5), 1.0 / (4 * pi));
    w.add(vm(2, 0.5), 0.0);
    const CoherenceModel model(RadialProfile::constant(), 1e8, 100.0);
    w.add(q12_mode(model, 0, 0.4, 0.4), 1.0);
    const bool band = validity_band(1.9) == BandStatus::ok &&
                      validity_band(2.1) == BandStatus::warning &&
                      validity_band(2.3) == BandStatus::outside;
    return std::pair{w.ok() && band, w.str()};
  });
}

// --- full -------------------------------------------------------------------

inline void property_checks(Report& rep) {
  run(rep, "specfun", "recurrence residuals", [] {
    Worst w(1e-10);
    for (int twice = 1; twice <= 80; ++twice) {
      const Order nu{twice};
      const Order lo{twice - 2};
      const Order hi{twice + 2};
      if (lo.twice_nu < -1) continue;
      for (double x = 0.25; x <= 60.0; x += 0.75) {
        const double j = bessel_j(nu, x);
        const double res = bessel_j(lo, x) + bessel_j(hi, x) - (2.0 * nu.value() / x) * j;
        w.add(res, 0.0, std::max(1.0, std::abs(j)));
      }
    }
    return verdict(w);
  });
  run(rep, "specfun", "half-integer cross products", [] {
    Worst w(1e-9);
    for (int l = 0; l <= 40; ++l)
      for (double x = 0.5; x <= 60.0; x += 1.3) {
        const Order nu = Order::half(l);
        const Order nu1 = Order::half(l + 1);
        const complex h = hankel1(nu, x);
        const complex h1 = hankel1(nu1, x);
        w.add_rel(h1.real() * h.imag() - h.real() * h1.imag(), 2.0 / (pi * x));
      }
    return verdict(w);
  });
  run(rep, "specfun", "chebyshev and gamma identities", [] {
    Worst w(1e-12);
    for (int q = 0; q <= 30; ++q)
      for (double t = 0.05; t < pi; t += 0.1)
        w.add(chebyshev_u(q, std::cos(t)) * std::sin(t), std::sin((q + 1) * t));
    for (double x = -5.95; x < 6.0; x += 0.1) {
      if (std::abs(x - std::round(x)) < 1e-9) continue;
      w.add(reciprocal_gamma(x) * reciprocal_gamma(1.0 - x), std::sin(pi * x) / pi);
    }
    return verdict(w);
  });
  run(rep, "modal", "u1 = -2 r u0", [] {
    Worst w(1e-12);
    for (int n : {2, 16})
      for (const auto& p : {RadialProfile::monomial(0), RadialProfile::monomial(2),
                            RadialProfile::monomial(4), RadialProfile::bessel_root(n, 1)}) {
        const auto c = line_source_coeffs(n, 1.25, 3, p);
        w.add_rel(c.u[1], -2.5 * c.u[0]);
      }
    return verdict(w);
  });
  run(rep, "modal", "order stability", [] {
    Worst w(0.0);
    const auto p = RadialProfile::monomial(2);
    const auto a = line_source_coeffs(4, 1.25, 12, p);
    const auto b = line_source_coeffs(4, 1.25, 17, p);
    for (int q = 0; q <= 12; ++q) w.add(a.u[q], b.u[q]);
    return verdict(w);
  });
  run(rep, "modal", "scale equivariance", [] {
    // Rounding in B is amplified roughly tenfold per order by the forward
    // substitution, so exact linearity is only visible at low order.
    Worst w(1e-8);
    const auto p = RadialProfile::monomial(2);
    const auto a = line_source_coeffs(4, 1.25, 10, p);
    const auto s = line_source_coeffs(4, 1.25, 10, RadialProfile::combination(3.5, p, 0.0, p));
    double scale = 0.0;
    for (const auto& u : a.u) scale = std::max(scale, std::abs(u));
    for (int q = 0; q <= 10; ++q) w.add(s.u[q], 3.5 * a.u[q], 3.5 * scale);
    return verdict(w);
  });
  run(rep, "modal", "system against projection oracle", [] {
    Worst w10(1e-6);
    Worst w16(1e-2);
    for (int n : {2, 16})
      for (double g : {0.0, 2.0, 4.0}) {
        const auto p = RadialProfile::monomial(g);
        const auto c = line_source_coeffs(n, 1.25, 16, p);
        const auto o = coeffs_oracle_split(n, 1.25, 16, p);
        double scale = 0.0;
        for (const auto& u : o.u) scale = std::max(scale, std::abs(u));
        for (int q = 0; q <= 16; ++q) (q <= 10 ? w10 : w16).add(c.u[q], o.u[q], scale);
      }
    return std::pair{w10.ok() && w16.ok(), "q<=10: " + w10.str() + "; q<=16: " + w16.str()};
  });
  run(rep, "field", "superposition", [] {
    Worst w(1e-8);
    const auto p1 = RadialProfile::monomial(2);
    const auto p2 = RadialProfile::bessel_root(2, 1);
    const double a = 0.7;
    const double b = -1.3;
    const auto mix = RadialProfile::combination(a, p1, b, p2);
    const double k = 5.0;
    const TonalSource s1(2, p1, k), s2(2, p2, k), sm(2, mix, k);
    for (const auto method :
         {FieldMethod::direct, FieldMethod::linesum, FieldMethod::series, FieldMethod::hankel}) {
      FieldOptions opt;
      opt.method = method;
      opt.tol = 1e-11;
      const Observer o(1.25, 1.0);
      const complex f1 = evaluate_field(s1, o, opt);
      const complex f2 = evaluate_field(s2, o, opt);
      w.add(evaluate_field(sm, o, opt), a * f1 + b * f2, std::abs(f1) + std::abs(f2));
    }
    return verdict(w);
  });
  run(rep, "field", "mirror symmetry", [] {
    Worst w(1e-12);
    const TonalSource s(3, RadialProfile::monomial(1), 4.0);
    for (const auto method :
         {FieldMethod::direct, FieldMethod::linesum, FieldMethod::series, FieldMethod::hankel})
      for (double z : {0.3, 1.7, 6.0}) {
        FieldOptions opt;
        opt.method = method;
        w.add_rel(evaluate_field(s, Observer(1.6, -z), opt), evaluate_field(s, Observer(1.6, z), opt));
      }
    return verdict(w);
  });
  run(rep, "field", "low-frequency shape universality", [] {
    // Normalized fields P(z)/P(0) of three radial profiles at k <= 1.
    Worst w(1e-2);
    for (double k : {0.5, 1.0}) {
      std::vector<complex> base;
      for (double g : {0.0, 2.0, 4.0}) {
        const TonalSource s(2, RadialProfile::monomial(g), k);
        const complex p0 = field_direct(s, Observer(1.25, 0.0));
        for (int i = 0; i <= 32; ++i) {
          const complex v = field_direct(s, Observer(1.25, 0.25 * i)) / p0;
          if (g == 0.0)
            base.push_back(v);
          else
            w.add(v, base[i]);
        }
      }
    }
    return verdict(w);
  });
  run(rep, "randomfield", "hermitian symmetry", [] {
    Worst w(1e-10);
    const CoherenceModel model(RadialProfile::constant(), 1.0, 0.5);
    for (int m : {0, 1}) {
      const auto c12 = xspec_coeffs(model, m, 1.25, 5.0, 1e-12);
      const auto c21 = xspec_coeffs(model, m, 5.0, 1.25, 1e-12);
      for (double z2 : {0.0, 1.5, 4.0}) {
        const Observer o1(1.25, 0.3), o2(5.0, z2);
        w.add_rel(cross_spectrum_mode(c21, 1.5, o2, o1),
                  std::conj(cross_spectrum_mode(c12, 1.5, o1, o2)));
      }
      const Observer o1(1.5, 0.5), o2(3.0, 2.0);
      w.add_rel(cross_spectrum_oracle(model, m, 1.5, o2, o1, 1e-10),
                std::conj(cross_spectrum_oracle(model, m, 1.5, o1, o2, 1e-10)));
    }
    return verdict(w);
  });
  run(rep, "randomfield", "coincident-point positivity", [] {
    bool ok = true;
    std::ostringstream os;
    for (int m : {0, 1})
      for (double beta : {100.0, 0.3}) {
        const CoherenceModel model(RadialProfile::constant(), 1.0, beta);
        const Observer o(2.0, 1.0);
        const auto c = xspec_coeffs(model, m, 2.0, 2.0);
        for (const complex v : {cross_spectrum_mode(c, 1.5, o, o),
                                cross_spectrum_oracle(model, m, 1.5, o, o)}) {
          if (!(v.real() >= 0.0 && std::abs(v.imag()) <= 1e-3 * v.real())) {
            ok = false;
            os << "m=" << m << " beta=" << beta << " W=" << v << "; ";
          }
        }
      }
    return std::pair{ok, ok ? std::string("real and non-negative") : os.str()};
  });
}

}  // namespace detail

inline Report run(Level level) {
  Report rep;
  rep.level = level;
  detail::quick_checks(rep);
  if (level == Level::full) detail::property_checks(rep);
  return rep;
}

inline const char* to_string(Level l) { return l == Level::quick ? "quick" : "full"; }

}  // namespace diskrad::selftest
