#pragma once

// Line-source coefficients u_q(r) of a radial source profile.
//
// Equating the line-source expansion of the in-plane field with the
// ring-source series and matching derivatives in k at k = 0 gives a lower
// triangular system E u = B. The entries of E are polynomials in r; the
// right-hand side carries weighted integrals of the profile. The projection
// oracle computes the same coefficients directly from the Chebyshev
// expansion of the sideline kernel K(r, r2).

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "diskrad/profile.hpp"
#include "diskrad/quadrature.hpp"
#include "diskrad/specfun.hpp"

namespace diskrad {

/// Raised when a truncated series fails to converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double factorial(int n) { return std::tgamma(n + 1.0); }

inline double binomial(int t, int s) {
  double r = 1.0;
  for (int i = 1; i <= s; ++i) r = r * (t - s + i) / i;
  return r;
}

inline complex ipow(int v) {
  static constexpr complex iq[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return iq[((v % 4) + 4) % 4];
}

}  // namespace detail

/// E_{t,q}(r) = 2^{-(q+1)} sum_{s=0}^{[t/2]} r^{t-2s} / (4^s s! (s+q+1)! (t-2s)!),
/// the Taylor coefficients of e^{ikr} J_{q+1}(k)/k.
inline double e_poly(int t, int q, double r) {
  if (t < 0 || q < 0) throw std::domain_error("e_poly: t, q must be >= 0");
  double sum = 0.0;
  for (int s = 0; s <= t / 2; ++s)
    sum += std::pow(r, t - 2 * s) /
           (std::pow(4.0, s) * detail::factorial(s) * detail::factorial(s + q + 1) *
            detail::factorial(t - 2 * s));
  return sum / std::pow(2.0, q + 1);
}

/// V_{n,t}(x) = sum_s C(t,s) x^{2s+n+1} / (Gamma(n+s+3/2) Gamma(t-s+n+3/2)).
inline double v_poly(int n, int t, double x) {
  double sum = 0.0;
  for (int s = 0; s <= t; ++s)
    sum += detail::binomial(t, s) * std::pow(x, 2 * s + n + 1) *
           reciprocal_gamma(n + s + 1.5) * reciprocal_gamma(t - s + n + 1.5);
  return sum;
}

/// W_{n,t}(x) = sum_s C(t,s) x^{2s+n+1} / (Gamma(n+s+3/2) Gamma(t-s-n+1/2)).
/// For t-s-n+1/2 = 1/2 - j < 0 the Gamma pair is evaluated as the finite
/// ratio (-1)^j / (pi prod_{i=0}^{t} (j + 1/2 + i)), valid for any n.
inline double w_poly(int n, int t, double x) {
  double sum = 0.0;
  for (int s = 0; s <= t; ++s) {
    const int j = n + s - t;
    double gammas;
    if (j >= 0) {
      double prod = 1.0;
      for (int i = 0; i <= t; ++i) prod *= j + 0.5 + i;
      gammas = ((j & 1) ? -1.0 : 1.0) / (pi * prod);
    } else {
      gammas = reciprocal_gamma(n + s + 1.5) * reciprocal_gamma(t - s - n + 0.5);
    }
    sum += detail::binomial(t, s) * std::pow(x, 2 * s + n + 1) * gammas;
  }
  return sum;
}

/// A_m = (2n+4m+1)(2n+2m-1)!!(2m-1)!! / (m! 2^m (2n+2m)!!).
inline double series_coefficient_a(int n, int m) {
  return (2.0 * n + 4.0 * m + 1.0) * detail::half_factorial_ratio(m) *
         detail::half_factorial_ratio(n + m);
}

/// Kernel T_v(r, a) of the right-hand side B_v = (i/4) int_0^1 T_v s_n da.
inline complex t_weight(int v, double r, double a, int n, double tol = 1e-16) {
  if (v < 0 || n < 0) throw std::domain_error("t_weight: v, n must be >= 0");
  const int vp = v / 2;
  const double x = a / r;
  const double sign = ((n + vp) & 1) ? -1.0 : 1.0;
  const double prefactor = sign * detail::factorial(v) * std::pow(0.5 * r, v);
  if (v & 1) {
    double sum = 0.0;
    for (int m = 0; n + 2 * m <= vp; ++m) {
      const int order = n + 2 * m;
      sum += series_coefficient_a(n, m) * v_poly(order, vp - order, x) /
             detail::factorial(vp - order);
    }
    return complex(prefactor * sum, 0.0);
  }
  double sum = 0.0;
  int small = 0;
  for (int m = 0; m < 200; ++m) {
    const double term = series_coefficient_a(n, m) * w_poly(n + 2 * m, vp, x);
    sum += term;
    if (std::abs(term) <= tol * std::abs(sum)) {
      if (++small == 3) return complex(0.0, -prefactor * sum / detail::factorial(vp));
    } else {
      small = 0;
    }
  }
  throw ConvergenceError("t_weight: m-series did not converge in 200 terms");
}

struct TriangularSystem {
  int order = 0;  // Q
  int n = 0;
  double r = 0.0;
  std::vector<std::vector<complex>> E;  // row v holds E[v][0..v]
  std::vector<complex> B;

  complex entry(int v, int q) const { return q > v ? complex{} : E[v][q]; }
};

struct LineSourceCoeffs {
  double r = 0.0;
  int n = 0;
  std::vector<complex> u;
  int reliable_order = 0;

  int order() const { return static_cast<int>(u.size()) - 1; }
};

/// Default number of line-source modes for wavenumber k.
inline int default_truncation(double k) {
  return std::min(20, std::max(11, static_cast<int>(std::ceil(k)) + 6));
}

inline complex e_entry(int v, int q, double r) {
  if (q > v) return {};
  return detail::ipow(v) * ((q + 1.0) * detail::factorial(v) * e_poly(v - q, q, r));
}

/// B_v = (i/4) int_0^1 T_v(r, a) s_n(a) da.
inline complex b_entry(int v, int n, double r, const RadialProfile& profile, double tol) {
  if (profile.is_zero()) return {};
  if ((v & 1) && v / 2 < n) return {};
  QuadOptions opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = tol;
  opt.l1_rel_tol = tol;
  const auto res = integrate_1d(
      [&](double a) { return t_weight(v, r, a, n) * profile(a); }, 0.0, 1.0, opt);
  return complex(0.0, 0.25) * res.value;
}

inline TriangularSystem build_system(int n, double r, int Q, const RadialProfile& profile,
                                     double tol = 1e-12) {
  if (!(r > 1.0)) throw std::domain_error("build_system: r must exceed 1");
  if (Q < 0 || Q > 40) throw std::domain_error("build_system: need 0 <= Q <= 40");
  if (n < 0) throw std::domain_error("build_system: n must be >= 0");
  TriangularSystem sys;
  sys.order = Q;
  sys.n = n;
  sys.r = r;
  sys.E.resize(Q + 1);
  sys.B.resize(Q + 1);
  for (int v = 0; v <= Q; ++v) {
    sys.E[v].resize(v + 1);
    for (int q = 0; q <= v; ++q) sys.E[v][q] = e_entry(v, q, r);
    sys.B[v] = b_entry(v, n, r, profile, tol);
  }
  return sys;
}

/// Forward substitution.
// TODO: derive reliable_order from r as well; rounding in the substitution
// grows roughly like r^Q, so at r = 200 even Q = 13 is already unusable.
inline LineSourceCoeffs solve_coeffs(const TriangularSystem& sys) {
  LineSourceCoeffs c;
  c.r = sys.r;
  c.n = sys.n;
  c.u.resize(sys.order + 1);
  for (int v = 0; v <= sys.order; ++v) {
    complex acc = sys.B[v];
    for (int q = 0; q < v; ++q) acc -= sys.E[v][q] * c.u[q];
    c.u[v] = acc / sys.E[v][v];
  }
  c.reliable_order = std::min(sys.order, 20);
  return c;
}

inline LineSourceCoeffs line_source_coeffs(int n, double r, int Q, const RadialProfile& profile,
                                           double tol = 1e-12) {
  return solve_coeffs(build_system(n, r, Q, profile, tol));
}

// --- Projection oracle -----------------------------------------------------

struct SidelinePoint {
  double a = 0.0;    // source radius
  double psi = 0.0;  // source azimuth
};

/// Source point at distance r2 from an observer at (r, 0), direction theta2.
inline SidelinePoint sideline_point(double r, double r2, double theta2) {
  const double a2 = r * r + r2 * r2 + 2.0 * r * r2 * std::cos(theta2);
  return {std::sqrt(std::max(0.0, a2)), std::atan2(r2 * std::sin(theta2), r + r2 * std::cos(theta2))};
}

/// Lower limit theta2^(0) of the sideline integral: the circle of radius r2
/// about the observer leaves the disk there.
inline double sideline_limit(double r, double r2) {
  const double c = (1.0 - r * r - r2 * r2) / (2.0 * r * r2);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

/// K(r, r+s) = (1/4pi) int_{theta0}^{2pi-theta0} e^{in psi} s_n(a) dtheta2.
/// abs_tol should be set near eps times the profile scale: where s_n is
/// close to a zero the integrand carries absolute, not relative, noise.
inline double kernel_k(int n, double r, double s, const RadialProfile& profile,
                       double tol = 1e-13, double abs_tol = 0.0) {
  if (!(s > -1.0 && s < 1.0)) return 0.0;
  const double r2 = r + s;
  const double t0 = sideline_limit(r, r2);
  if (!(t0 < pi)) return 0.0;
  QuadOptions opt;
  opt.abs_tol = abs_tol;
  opt.rel_tol = tol;
  opt.l1_rel_tol = tol;
  const auto res = integrate_1d(
      [&](double th) {
        const auto p = sideline_point(r, r2, th);
        return std::cos(n * p.psi) * profile(std::min(p.a, 1.0));
      },
      t0, pi, opt);
  return res.value.real() / (2.0 * pi);
}

/// u_q = (2/pi) sum_j w_j K(r, r+s_j) U_q(s_j) / sqrt(1-s_j^2) on N
/// Gauss-Chebyshev nodes. Spectrally accurate when K/sqrt(1-s^2) is smooth,
/// i.e. when s_n(a) e^{in psi} is smooth at the origin.
inline LineSourceCoeffs coeffs_oracle(int n, double r, int Q, const RadialProfile& profile,
                                      int nodes = 64) {
  if (!(r > 1.0)) throw std::domain_error("coeffs_oracle: r must exceed 1");
  LineSourceCoeffs c;
  c.r = r;
  c.n = n;
  c.u.assign(Q + 1, complex{});
  c.reliable_order = Q;
  if (profile.is_zero()) return c;
  const double floor = 1e-15 * profile.sup_norm();
  for (const auto& nd : chebyshev2_nodes(nodes)) {
    const double k =
        kernel_k(n, r, nd.node, profile, 1e-13, floor) / std::sqrt(1.0 - nd.node * nd.node);
    for (int q = 0; q <= Q; ++q) c.u[q] += nd.weight * k * chebyshev_u(q, nd.node);
  }
  for (auto& x : c.u) x *= 2.0 / pi;
  return c;
}

/// Same projection, u_q = (2/pi) int_0^pi K(r, r+cos t) sin((q+1) t) dt,
/// with Gauss-Legendre rules on [0, pi/2] and [pi/2, pi] doubled until the
/// coefficients settle. Splitting at s = 0 isolates the kink K has there
/// when the circle r2 = r passes through the origin.
inline LineSourceCoeffs coeffs_oracle_split(int n, double r, int Q, const RadialProfile& profile,
                                            double tol = 1e-12, int max_nodes = 2048) {
  if (!(r > 1.0)) throw std::domain_error("coeffs_oracle_split: r must exceed 1");
  LineSourceCoeffs c;
  c.r = r;
  c.n = n;
  c.u.assign(Q + 1, complex{});
  c.reliable_order = Q;
  if (profile.is_zero()) return c;
  const double floor = 1e-15 * profile.sup_norm();
  std::vector<complex> prev;
  for (int m = 32; m <= max_nodes; m *= 2) {
    std::vector<complex> u(Q + 1);
    for (const auto& nd : gauss_legendre(m)) {
      for (double centre : {0.25 * pi, 0.75 * pi}) {
        const double t = centre + 0.25 * pi * nd.node;
        const double k = kernel_k(n, r, std::cos(t), profile, 1e-13, floor);
        const double w = 0.25 * pi * nd.weight * k;
        for (int q = 0; q <= Q; ++q) u[q] += w * std::sin((q + 1) * t);
      }
    }
    for (auto& x : u) x *= 2.0 / pi;
    if (!prev.empty()) {
      double diff = 0.0;
      double scale = 0.0;
      for (int q = 0; q <= Q; ++q) {
        diff = std::max(diff, std::abs(u[q] - prev[q]));
        scale = std::max(scale, std::abs(u[q]));
      }
      if (diff <= tol * scale) {
        c.u = u;
        return c;
      }
    }
    prev = std::move(u);
  }
  c.u = prev;
  return c;
}

}  // namespace diskrad
