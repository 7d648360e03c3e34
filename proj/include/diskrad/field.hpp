#pragma once

// Tonal fields of a disk source s_n(a) e^{in psi} at an observer (r, 0, z):
// direct quadrature of the Rayleigh integral, line-source summation,
// ring-source series and the far-field Hankel transform.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "diskrad/linesource.hpp"
#include "diskrad/modal.hpp"
#include "diskrad/profile.hpp"
#include "diskrad/quadrature.hpp"
#include "diskrad/specfun.hpp"

namespace diskrad {

struct TonalSource {
  int n = 0;
  RadialProfile profile;
  double k = 0.0;

  TonalSource() = default;
  TonalSource(int n_, RadialProfile p, double k_) : n(n_), profile(std::move(p)), k(k_) {
    if (n < 0) throw std::domain_error("TonalSource: n must be >= 0");
    if (!(k >= 0.0)) throw std::domain_error("TonalSource: k must be >= 0");
  }
};

namespace detail {

/// Distance from the observer to the source point (a, psi).
inline double source_distance(const Observer& obs, double a, double psi) {
  const double r = obs.r();
  const double z = obs.z();
  return std::sqrt(r * r + a * a - 2.0 * r * a * std::cos(psi) + z * z);
}

/// Integrand of the ring integral folded onto [0, pi]; the factor 2 from
/// the fold cancels against 1/(4 pi) to leave 1/(2 pi).
inline complex ring_integrand(int n, double k, double a, const Observer& obs, double psi) {
  const double d = source_distance(obs, a, psi);
  return std::exp(complex(0.0, k * d)) * (std::cos(n * psi) / (2.0 * pi * d));
}

/// (-1)^m (2n+4m+1)(2m-1)!!/(2n+2m)!!, the coefficient of the ring series.
inline double ring_coefficient(int n, int m) {
  // (2m-1)!!/(2n+2m)!! = ratio(m) (2m)!!/(2n+2m)!! = ratio(m) / prod_{j=m+1}^{n+m} 2j
  double c = (2.0 * n + 4.0 * m + 1.0) * half_factorial_ratio(m);
  for (int j = m + 1; j <= n + m; ++j) c /= 2.0 * j;
  return (m & 1) ? -c : c;
}

/// Sums terms term(m) for m = 0, 1, ... until three consecutive terms are
/// below tol relative to the running sum.
template <class Term>
complex sum_until_small(Term&& term, double tol, int max_terms, const char* what) {
  complex sum{};
  int small = 0;
  for (int m = 0; m < max_terms; ++m) {
    const complex t = term(m);
    sum += t;
    if (std::abs(t) <= tol * std::abs(sum) || (t == complex{} && sum == complex{})) {
      if (++small == 3) return sum;
    } else {
      small = 0;
    }
  }
  throw ConvergenceError(std::string(what) + ": series did not converge");
}

}  // namespace detail

/// Field of a ring of radius a: (1/4pi) int_0^{2pi} e^{i(kR'+n psi)}/R' dpsi.
inline complex ring_field_quadrature(int n, double k, double a, const Observer& obs,
                                     double tol = 1e-11, WorkCounter* work = nullptr) {
  if (!(a >= 0.0 && a <= 1.0)) throw std::domain_error("ring_field_quadrature: need 0 <= a <= 1");
  if (a == 0.0) {
    if (n != 0) return {};
    return std::exp(complex(0.0, k * obs.R())) / (2.0 * obs.R());
  }
  QuadOptions opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = tol;
  opt.l1_rel_tol = 0.1 * tol;
  const auto res = integrate_1d(
      [&](double psi) { return detail::ring_integrand(n, k, a, obs, psi); }, 0.0, pi, opt);
  if (work) work->add(res.evaluations);
  return res.value;
}

/// Ring field by its spherical-harmonic series, converging for a < R.
inline complex ring_field_series(int n, double k, double a, const Observer& obs,
                                 double tol = 1e-14) {
  if (!(a > 0.0 && a <= 1.0)) throw std::domain_error("ring_field_series: need 0 < a <= 1");
  if (!(k > 0.0)) throw std::domain_error("ring_field_series: need k > 0");
  const double R = obs.R();
  const double c = obs.cos_phi();
  auto term = [&](int m) {
    const Order nu = Order::half(n + 2 * m);
    return detail::ring_coefficient(n, m) * assoc_legendre(n + 2 * m, n, c) *
           bessel_j(nu, k * a) * hankel1(nu, k * R);
  };
  const complex sum = detail::sum_until_small(term, tol, 150, "ring_field_series");
  return detail::ipow(2 * n + 1) * (pi / 4.0) / std::sqrt(a * R) * sum;
}

/// Rayleigh integral by nested adaptive quadrature (the fold psi -> -psi
/// halves the azimuthal range).
inline QuadResult field_direct_result(const TonalSource& src, const Observer& obs,
                                      double tol = 1e-9) {
  if (src.profile.is_zero()) return QuadResult{{}, 0.0, 1, 0.0, false};
  QuadOptions opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = tol;
  opt.l1_rel_tol = 0.1 * tol;
  return integrate_2d(
      [&](double a, double psi) {
        return a * src.profile(a) * detail::ring_integrand(src.n, src.k, a, obs, psi);
      },
      Rect{0.0, 1.0, 0.0, pi}, opt);
}

inline complex field_direct(const TonalSource& src, const Observer& obs, double tol = 1e-9) {
  return field_direct_result(src, obs, tol).value;
}

/// sum_{q <= q_max} u_q L_q(k, obs).
inline complex field_line_sum(const LineSourceCoeffs& coeffs, double k, const Observer& obs,
                              int q_max, const LqPolicy& policy = {}) {
  if (std::abs(coeffs.r - obs.r()) > 1e-12 * obs.r())
    throw std::invalid_argument("field_line_sum: coefficients were computed for another radius");
  if (q_max < 0 || q_max > coeffs.order() || q_max > coeffs.reliable_order)
    throw std::invalid_argument("field_line_sum: q_max beyond the available coefficients");
  complex sum{};
  for (int q = 0; q <= q_max; ++q) {
    if (coeffs.u[q] == complex{}) continue;
    sum += coeffs.u[q] * lq_auto(q, k, obs, policy).value;
  }
  return sum;
}

/// S_{n+2m} = H_nu(kR) R^{-1/2} int_0^1 s_n(a) J_nu(ka) a^{1/2} da.
inline complex series_integral(const TonalSource& src, int order, const Observer& obs,
                               double tol = 1e-12) {
  const Order nu = Order::half(order);
  QuadOptions opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = tol;
  opt.l1_rel_tol = tol;
  const auto res = integrate_1d(
      [&](double a) { return src.profile(a) * bessel_j(nu, src.k * a) * std::sqrt(a); }, 0.0,
      1.0, opt);
  return res.value * hankel1(nu, src.k * obs.R()) / std::sqrt(obs.R());
}

/// Ring series integrated against a s_n(a), term by term.
inline complex field_series(const TonalSource& src, const Observer& obs, double tol = 1e-12) {
  if (!(src.k > 0.0)) throw std::domain_error("field_series: need k > 0");
  if (src.profile.is_zero()) return {};
  const double c = obs.cos_phi();
  auto term = [&](int m) {
    return detail::ring_coefficient(src.n, m) * assoc_legendre(src.n + 2 * m, src.n, c) *
           series_integral(src, src.n + 2 * m, obs, tol);
  };
  const complex sum = detail::sum_until_small(term, tol, 150, "field_series");
  return detail::ipow(2 * src.n + 1) * (pi / 4.0) * sum;
}

/// Far-field form (-i)^n e^{ikR}/(2R) int_0^1 J_n(k a sin phi) s_n(a) a da.
inline complex field_farfield_hankel(const TonalSource& src, double R, double phi,
                                     double tol = 1e-12) {
  if (!(R > 0.0)) throw std::domain_error("field_farfield_hankel: need R > 0");
  const double sphi = std::sin(phi);
  if (sphi < 0.0) throw std::domain_error("field_farfield_hankel: need sin(phi) >= 0");
  if (src.profile.is_zero()) return {};
  QuadOptions opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = tol;
  opt.l1_rel_tol = tol;
  const auto res = integrate_1d(
      [&](double a) { return bessel_j(src.n, src.k * a * sphi) * src.profile(a) * a; }, 0.0,
      1.0, opt);
  return detail::ipow(-src.n) * std::exp(complex(0.0, src.k * R)) / (2.0 * R) * res.value;
}

inline complex field_farfield_hankel(const TonalSource& src, const Observer& obs,
                                     double tol = 1e-12) {
  return field_farfield_hankel(src, obs.R(), obs.phi(), tol);
}

enum class FieldMethod { direct, linesum, series, hankel };

inline FieldMethod parse_field_method(const std::string& s) {
  if (s == "direct") return FieldMethod::direct;
  if (s == "linesum") return FieldMethod::linesum;
  if (s == "series") return FieldMethod::series;
  if (s == "hankel") return FieldMethod::hankel;
  throw std::invalid_argument("unknown field method '" + s + "'");
}

inline const char* to_string(FieldMethod m) {
  switch (m) {
    case FieldMethod::direct: return "direct";
    case FieldMethod::linesum: return "linesum";
    case FieldMethod::series: return "series";
    case FieldMethod::hankel: return "hankel";
  }
  return "?";
}

struct FieldOptions {
  FieldMethod method = FieldMethod::direct;
  double tol = 1e-9;
  int modes = -1;  // line-source modes for linesum; -1 selects default_truncation(k)
  LqPolicy lq;
};

/// Evaluates one field point. For linesum the coefficients are built for
/// obs.r(); sweeps at fixed r should build them once and call
/// field_line_sum directly.
inline complex evaluate_field(const TonalSource& src, const Observer& obs,
                              const FieldOptions& opt = {}) {
  switch (opt.method) {
    case FieldMethod::direct: return field_direct(src, obs, opt.tol);
    case FieldMethod::series: return field_series(src, obs, std::min(opt.tol, 1e-10));
    case FieldMethod::hankel: return field_farfield_hankel(src, obs);
    case FieldMethod::linesum: {
      const int Q = opt.modes >= 0 ? opt.modes - 1 : default_truncation(src.k);
      const auto c = line_source_coeffs(src.n, obs.r(), Q, src.profile);
      return field_line_sum(c, src.k, obs, Q, opt.lq);
    }
  }
  return {};
}

// --- Cancellation ----------------------------------------------------------

/// zeta = u_0 / u_0', the scale that matches the secondary source's lowest
/// line-source mode to the primary's.
inline complex cancel_scale(const LineSourceCoeffs& primary, const LineSourceCoeffs& secondary) {
  if (primary.u.empty() || secondary.u.empty())
    throw std::invalid_argument("cancel_scale: empty coefficient sets");
  const complex u0s = secondary.u[0];
  if (std::abs(u0s) <= 1e-300 || std::abs(u0s) <= 1e-14 * std::abs(primary.u[0]))
    throw std::domain_error("cancel_scale: secondary source has no u_0 component");
  return primary.u[0] / u0s;
}

/// Residual field P[s_A] - zeta P[s_B] (superposition).
inline complex cancel_field(const TonalSource& a, const TonalSource& b, complex zeta,
                            const Observer& obs, const FieldOptions& opt = {}) {
  if (a.n != b.n || a.k != b.k)
    throw std::invalid_argument("cancel_field: sources must share n and k");
  return evaluate_field(a, obs, opt) - zeta * evaluate_field(b, obs, opt);
}

/// 20 log10(|p| / |ref|), floored at -200 dB.
inline double decibels(complex p, complex ref) {
  const double ratio = std::abs(p) / std::abs(ref);
  if (!(ratio > 1e-10)) return -200.0;
  return 20.0 * std::log10(ratio);
}

}  // namespace diskrad
