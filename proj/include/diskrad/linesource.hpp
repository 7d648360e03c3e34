#pragma once

// Elementary line-source fields
//   L_q(k, r, z) = int_{-1}^{1} e^{ikR'}/R' U_q(s) (r+s) sqrt(1-s^2) ds,
//   R' = sqrt((r+s)^2 + z^2),
// by quadrature, by the exact in-plane result and by the far-field form.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "diskrad/quadrature.hpp"
#include "diskrad/specfun.hpp"

namespace diskrad {

/// Field point in cylindrical coordinates (r, z), lengths in disk radii.
/// Valid for r > 1, where the equivalent line source lies beside the disk.
class Observer {
 public:
  Observer(double r, double z) : r_(r), z_(z) {
    if (!(std::isfinite(r) && std::isfinite(z)))
      throw std::domain_error("Observer: non-finite coordinate");
    if (!(r > 1.0)) throw std::domain_error("Observer: radius must exceed the disk radius (r > 1)");
  }

  double r() const { return r_; }
  double z() const { return z_; }
  double R() const { return std::hypot(r_, z_); }
  /// Polar angle from the axis, phi = arccos(z/R).
  double phi() const { return std::acos(z_ / R()); }
  double sin_phi() const { return r_ / R(); }
  double cos_phi() const { return z_ / R(); }
  Observer mirrored() const { return Observer(r_, -z_); }

 private:
  double r_;
  double z_;
};

enum class LqPath { inplane, farfield, quadrature };

inline const char* to_string(LqPath p) {
  switch (p) {
    case LqPath::inplane: return "inplane";
    case LqPath::farfield: return "farfield";
    case LqPath::quadrature: return "quadrature";
  }
  return "?";
}

struct LqPolicy {
  enum class Mode {
    automatic,    // in-plane exact, far field beyond farfield_radius, else quadrature
    quadrature,   // always quadrature
    closed_form,  // in-plane exact when z = 0, far-field form otherwise
  };
  Mode mode = Mode::automatic;
  double farfield_radius = 25.0;
  double inplane_eps = 1e-12;
  double tol = 1e-11;
};

struct LqValue {
  complex value;
  LqPath path;
};

namespace detail {

/// Taylor coefficients (about s0, to order q) of
/// f(s) = e^{ik rho} (r+s)/rho, rho = sqrt((r+s)^2 + z^2).
/// With c = r + s0 two factorizations are used. For |z| < c/2, rho = (c+t) h
/// with h = sqrt(1 + z^2/(c+t)^2), so (r+s)/rho = 1/h and nothing cancels
/// near z = 0. Otherwise rho is expanded as the square root of the
/// quadratic (c+t)^2 + z^2, whose coefficients decay at the rate set by the
/// branch points t = -c +- iz instead of the faster-growing 1/c^j.
struct LineKernelTaylor {
  std::vector<double> w, u, h, hinv, rho;
  std::vector<complex> ex, out;

  void compute(int q, double k, double r, double z, double s0) {
    const int n = q + 1;
    w.assign(n, 0.0);
    u.assign(n, 0.0);
    h.assign(n, 0.0);
    hinv.assign(n, 0.0);
    rho.assign(n, 0.0);
    ex.assign(n, complex{});
    out.assign(n, complex{});
    const double c = r + s0;
    const double z2 = z * z;
    if (2.0 * std::abs(z) < c) {
      // 1/(c+t)
      w[0] = 1.0 / c;
      for (int j = 1; j < n; ++j) w[j] = -w[j - 1] / c;
      // z^2/(c+t)^2
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int i = 0; i <= j; ++i) acc += w[i] * w[j - i];
        u[j] = z2 * acc;
      }
      // sqrt(1 + u)
      h[0] = std::sqrt(1.0 + u[0]);
      for (int j = 1; j < n; ++j) {
        double acc = u[j];
        for (int i = 1; i < j; ++i) acc -= h[i] * h[j - i];
        h[j] = acc / (2.0 * h[0]);
      }
      reciprocal(h, hinv);
      for (int j = 0; j < n; ++j) rho[j] = c * h[j] + (j > 0 ? h[j - 1] : 0.0);
    } else {
      // rho^2 = (c^2 + z^2) + 2c t + t^2
      const double p[3] = {c * c + z2, 2.0 * c, 1.0};
      rho[0] = std::sqrt(p[0]);
      for (int j = 1; j < n; ++j) {
        double acc = j < 3 ? p[j] : 0.0;
        for (int i = 1; i < j; ++i) acc -= rho[i] * rho[j - i];
        rho[j] = acc / (2.0 * rho[0]);
      }
      // (c+t)/rho
      reciprocal(rho, w);
      for (int j = 0; j < n; ++j) hinv[j] = c * w[j] + (j > 0 ? w[j - 1] : 0.0);
    }
    const complex ik(0.0, k);
    ex[0] = std::exp(ik * rho[0]);
    for (int j = 1; j < n; ++j) {
      complex acc{};
      for (int i = 1; i <= j; ++i) acc += double(i) * rho[i] * ex[j - i];
      ex[j] = ik * acc / double(j);
    }
    for (int j = 0; j < n; ++j) {
      complex acc{};
      for (int i = 0; i <= j; ++i) acc += ex[i] * hinv[j - i];
      out[j] = acc;
    }
  }

 private:
  static void reciprocal(const std::vector<double>& a, std::vector<double>& inv) {
    inv[0] = 1.0 / a[0];
    for (std::size_t j = 1; j < a.size(); ++j) {
      double acc = 0.0;
      for (std::size_t i = 1; i <= j; ++i) acc += a[i] * inv[j - i];
      inv[j] = -acc / a[0];
    }
  }
};

}  // namespace detail

/// L_q by adaptive quadrature. The integral is evaluated after q
/// integrations by parts against U_q(s) sqrt(1-s^2) ~ d^q/ds^q (1-s^2)^{q+1/2},
///   L_q = (q+1)/(2q+1)!! int f^{(q)}(s) (1-s^2)^{q+1/2} ds,
/// which keeps relative accuracy for exponentially small modes.
inline QuadResult lq_quadrature_result(int q, double k, const Observer& obs, double tol) {
  if (q < 0) throw std::domain_error("lq_quadrature: q must be >= 0");
  if (!(k >= 0.0)) throw std::domain_error("lq_quadrature: k must be >= 0");
  double prefactor = q + 1.0;
  for (int j = 1; j <= q; ++j) prefactor *= double(j) / (2.0 * j + 1.0);  // q!/(2q+1)!!
  const double r = obs.r();
  const double z = obs.z();
  detail::LineKernelTaylor taylor;
  auto integrand = [&](double theta) {
    const double s = std::cos(theta);
    const double w = std::pow(std::sin(theta), 2 * q + 2);
    if (w == 0.0) return complex{};
    taylor.compute(q, k, r, z, s);
    return taylor.out[q] * w;
  };
  QuadOptions opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = tol;
  opt.l1_rel_tol = 1e-14;
  QuadResult res = integrate_1d(integrand, 0.0, pi, opt);
  res.value *= prefactor;
  res.abs_error_estimate *= prefactor;
  res.l1_norm *= prefactor;
  return res;
}

inline complex lq_quadrature(int q, double k, const Observer& obs, double tol = 1e-11) {
  return lq_quadrature_result(q, k, obs, tol).value;
}

/// Exact in-plane value L_q(k, r, 0) = i^q (q+1) pi e^{ikr} J_{q+1}(k)/k.
inline complex lq_inplane_exact(int q, double k, double r) {
  if (q < 0) throw std::domain_error("lq_inplane_exact: q must be >= 0");
  if (!(k >= 0.0)) throw std::domain_error("lq_inplane_exact: k must be >= 0");
  static constexpr complex iq[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  if (k == 0.0) return q == 0 ? complex(0.5 * pi) : complex{};
  return iq[q % 4] * ((q + 1.0) * pi * bessel_j(q + 1, k) / k) *
         std::exp(complex(0.0, k * r));
}

/// Far-field form of L_q, accurate for R >> 1.
inline complex lq_farfield(int q, double k, const Observer& obs) {
  if (q < 0) throw std::domain_error("lq_farfield: q must be >= 0");
  const double sphi = obs.sin_phi();
  const double ks = k * sphi;
  // The bracket cancels to O((k sin phi)^2) near the axis, so roundoff is
  // amplified by 1/(k sin phi)^2; refuse rather than return noise.
  if (!(ks > 1e-6)) throw std::domain_error("lq_farfield: k sin(phi) too small (observer near the axis)");
  static constexpr complex iq[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const double R = obs.R();
  const complex I(0.0, 1.0);
  const complex bracket = (obs.r() + I * ((q + 2.0) / ks)) * bessel_j(q + 1, ks) -
                          I * bessel_j(q, ks);
  return iq[q % 4] * pi * std::exp(I * (k * R)) / R * ((q + 1.0) / ks) * bracket;
}

inline LqValue lq_auto(int q, double k, const Observer& obs, const LqPolicy& policy = {},
                       WorkCounter* work = nullptr) {
  const bool inplane = std::abs(obs.z()) < policy.inplane_eps;
  auto by_quadrature = [&]() -> LqValue {
    const QuadResult res = lq_quadrature_result(q, k, obs, policy.tol);
    if (work) work->add(res.evaluations);
    return {res.value, LqPath::quadrature};
  };
  auto closed = [&](complex v, LqPath path) -> LqValue {
    if (work) work->add(1);
    return {v, path};
  };
  switch (policy.mode) {
    case LqPolicy::Mode::quadrature:
      return by_quadrature();
    case LqPolicy::Mode::closed_form:
      if (inplane) return closed(lq_inplane_exact(q, k, obs.r()), LqPath::inplane);
      return closed(lq_farfield(q, k, obs), LqPath::farfield);
    case LqPolicy::Mode::automatic:
      break;
  }
  if (inplane) return closed(lq_inplane_exact(q, k, obs.r()), LqPath::inplane);
  if (obs.R() >= policy.farfield_radius && k > 0.0)
    return closed(lq_farfield(q, k, obs), LqPath::farfield);
  return by_quadrature();
}

}  // namespace diskrad
