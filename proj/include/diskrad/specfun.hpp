#pragma once

// Special functions needed by the disk radiation code: Bessel J of integer
// and half-integer order, half-integer Hankel functions, modified Bessel I,
// Chebyshev U, associated Legendre functions, double factorials and the
// reciprocal Gamma function.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace diskrad {

using complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

/// Order of a Bessel function stored as twice its value, so that integer and
/// half-integer orders share one representation.
struct Order {
  int twice_nu = 0;

  static constexpr Order integer(int n) { return Order{2 * n}; }
  /// Order l + 1/2.
  static constexpr Order half(int l) { return Order{2 * l + 1}; }

  constexpr double value() const { return 0.5 * twice_nu; }
  constexpr bool is_half_integer() const { return (twice_nu & 1) != 0; }
  /// For a half-integer order l + 1/2, returns l.
  constexpr int spherical_index() const { return (twice_nu - 1) / 2; }
};

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

/// J_n(x) by its power series; used for small x only.
inline double bessel_jn_series(int n, double x) {
  const double h = 0.5 * x;
  double prefactor = std::exp(n * std::log(h) - std::lgamma(n + 1.0));
  double term = 1.0;
  double sum = 1.0;
  const double h2 = -h * h;
  for (int k = 1; k < 200; ++k) {
    term *= h2 / (k * double(n + k));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return prefactor * sum;
}

/// J_n(x), x > 2, by Miller backward recurrence normalised with
/// J_0 + 2 sum J_{2k} = 1.
inline double bessel_jn_miller(int n, double x) {
  const double big = std::max<double>(n, x);
  int start = static_cast<int>(big + 20.0 + std::sqrt(40.0 * big));
  start += start & 1;
  double next = 0.0;
  double cur = 1e-30;
  double norm = 0.0;
  double saved = 0.0;
  for (int k = start; k >= 1; --k) {
    const double prev = (2.0 * k / x) * cur - next;
    next = cur;
    cur = prev;  // cur now holds J_{k-1}
    if (k - 1 == n) saved = cur;
    if (((k - 1) & 1) == 0) norm += (k - 1 == 0 ? 1.0 : 2.0) * cur;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      saved *= 1e-250;
    }
  }
  return saved / norm;
}

/// Spherical Bessel j_l(x) by its power series, x <= 1.
inline double spherical_j_series(int l, double x) {
  double prefactor = 1.0;
  for (int j = 1; j <= l; ++j) prefactor *= x / (2.0 * j + 1.0);
  double term = 1.0;
  double sum = 1.0;
  const double h = -0.5 * x * x;
  for (int k = 1; k < 100; ++k) {
    term *= h / (k * (2.0 * l + 2.0 * k + 1.0));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return prefactor * sum;
}

/// Spherical Bessel j_l(x), x > 1, by downward recurrence normalised against
/// the closed forms of j_0 and j_1.
inline double spherical_j_miller(int l, double x) {
  const double big = std::max<double>(l, x);
  const int start = static_cast<int>(big + 20.0 + std::sqrt(40.0 * big));
  double next = 0.0;
  double cur = 1e-30;
  double saved = (l == start) ? cur : 0.0;
  double j1_unscaled = 0.0;
  for (int k = start; k >= 1; --k) {
    const double prev = ((2.0 * k + 1.0) / x) * cur - next;
    next = cur;
    cur = prev;  // j_{k-1}
    if (k - 1 == l) saved = cur;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      saved *= 1e-250;
    }
  }
  j1_unscaled = next;
  const double s = std::sin(x);
  const double c = std::cos(x);
  const double j0 = s / x;
  const double j1 = s / (x * x) - c / x;
  if (std::abs(j0) >= std::abs(j1)) return saved * (j0 / cur);
  return saved * (j1 / j1_unscaled);
}

inline double spherical_j(int l, double x) {
  if (x == 0.0) return l == 0 ? 1.0 : 0.0;
  if (x <= 1.0) return spherical_j_series(l, x);
  return spherical_j_miller(l, x);
}

/// Spherical Bessel y_l(x) by upward recurrence, l >= -1.
inline double spherical_y(int l, double x) {
  const double s = std::sin(x);
  const double c = std::cos(x);
  if (l == -1) return s / x;
  double ym = -c / x;
  if (l == 0) return ym;
  double y = -c / (x * x) - s / x;
  for (int j = 1; j < l; ++j) {
    const double yn = ((2.0 * j + 1.0) / x) * y - ym;
    ym = y;
    y = yn;
  }
  return y;
}

/// Gamma(j + 1/2) / (sqrt(pi) j!) = (2j-1)!! / (2j)!!.
inline double half_factorial_ratio(int j) {
  if (j < 64) {
    double r = 1.0;
    for (int i = 1; i <= j; ++i) r *= (2.0 * i - 1.0) / (2.0 * i);
    return r;
  }
  return std::exp(std::lgamma(j + 0.5) - std::lgamma(j + 1.0)) /
         std::sqrt(pi);
}

}  // namespace detail

/// Bessel function of the first kind J_nu(x) for integer or half-integer
/// order, x >= 0.
inline double bessel_j(Order nu, double x) {
  detail::require(x >= 0.0, "bessel_j: argument must be non-negative");
  detail::require(nu.twice_nu >= -1, "bessel_j: order below -1/2");
  if (nu.is_half_integer()) {
    const int l = nu.spherical_index();
    if (l == -1) {
      detail::require(x > 0.0, "bessel_j: J_{-1/2} is singular at 0");
      return std::sqrt(2.0 / (pi * x)) * std::cos(x);
    }
    if (x == 0.0) return 0.0;
    return std::sqrt(2.0 * x / pi) * detail::spherical_j(l, x);
  }
  const int n = nu.twice_nu / 2;
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (x <= 2.0) return detail::bessel_jn_series(n, x);
  return detail::bessel_jn_miller(n, x);
}

inline double bessel_j(int n, double x) { return bessel_j(Order::integer(n), x); }

/// dJ_n/dx.
inline double bessel_j_derivative(int n, double x) {
  if (n == 0) return -bessel_j(1, x);
  return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x));
}

/// Bessel function of the second kind for half-integer order, x > 0.
inline double bessel_y_half(Order nu, double x) {
  detail::require(nu.is_half_integer(), "bessel_y_half: order must be half-integer");
  detail::require(x > 0.0, "bessel_y_half: argument must be positive");
  const int l = nu.spherical_index();
  detail::require(l >= -1, "bessel_y_half: order below -1/2");
  if (l == -1) return std::sqrt(2.0 / (pi * x)) * std::sin(x);
  return std::sqrt(2.0 * x / pi) * detail::spherical_y(l, x);
}

/// Hankel function of the first kind H^(1)_nu(x) = J_nu(x) + i Y_nu(x),
/// half-integer order, x > 0.
inline complex hankel1(Order nu, double x) {
  detail::require(nu.is_half_integer(), "hankel1: order must be half-integer");
  detail::require(x > 0.0, "hankel1: argument must be positive");
  return {bessel_j(nu, x), bessel_y_half(nu, x)};
}

/// Modified Bessel function I_m(x). With scaled = true returns e^{-x} I_m(x),
/// which stays finite for large x.
inline double bessel_i(int m, double x, bool scaled = false) {
  detail::require(x >= 0.0, "bessel_i: argument must be non-negative");
  detail::require(m >= 0, "bessel_i: order must be non-negative");
  if (x == 0.0) return m == 0 ? 1.0 : 0.0;
  if (x <= 5.0) {
    const double h = 0.5 * x;
    double term = std::exp(m * std::log(h) - std::lgamma(m + 1.0));
    double sum = term;
    for (int k = 1; k < 200; ++k) {
      term *= h * h / (k * double(m + k));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return scaled ? sum * std::exp(-x) : sum;
  }
  // Backward recurrence normalised with I_0 + 2 sum I_k = e^x.
  const int start = std::max(m, static_cast<int>(9.0 * std::sqrt(x))) + 30;
  double next = 0.0;
  double cur = 1e-30;
  double norm = 0.0;
  double saved = 0.0;
  for (int k = start; k >= 1; --k) {
    const double prev = next + (2.0 * k / x) * cur;
    next = cur;
    cur = prev;
    if (k - 1 == m) saved = cur;
    norm += (k - 1 == 0 ? 1.0 : 2.0) * cur;
    if (cur > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      saved *= 1e-250;
    }
  }
  const double scaled_value = saved / norm;
  return scaled ? scaled_value : scaled_value * std::exp(x);
}

/// Chebyshev polynomial of the second kind U_q(s), |s| <= 1.
inline double chebyshev_u(int q, double s) {
  detail::require(q >= 0, "chebyshev_u: degree must be non-negative");
  detail::require(std::abs(s) <= 1.0, "chebyshev_u: |s| > 1");
  if (q == 0) return 1.0;
  double um = 1.0;
  double u = 2.0 * s;
  for (int j = 1; j < q; ++j) {
    const double un = 2.0 * s * u - um;
    um = u;
    u = un;
  }
  return u;
}

/// Associated Legendre function P_l^m(x) including the Condon-Shortley phase,
/// so that P_l^m(0) = (-1)^{(l+m)/2} (l+m-1)!!/(l-m)!! for l+m even.
inline double assoc_legendre(int l, int m, double x) {
  detail::require(m >= 0 && m <= l, "assoc_legendre: need 0 <= m <= l");
  detail::require(std::abs(x) <= 1.0, "assoc_legendre: |x| > 1");
  const double root = std::sqrt((1.0 - x) * (1.0 + x));
  double pmm = 1.0;
  for (int i = 1; i <= m; ++i) pmm *= -(2.0 * i - 1.0) * root;
  if (l == m) return pmm;
  double pm1 = x * (2.0 * m + 1.0) * pmm;
  for (int ll = m + 2; ll <= l; ++ll) {
    const double p = (x * (2.0 * ll - 1.0) * pm1 - (ll + m - 1.0) * pmm) / (ll - m);
    pmm = pm1;
    pm1 = p;
  }
  return pm1;
}

/// n!! with (-1)!! = 0!! = 1.
inline double double_factorial(int n) {
  detail::require(n >= -1, "double_factorial: n < -1");
  double r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

/// 1/Gamma(x), an entire function: exactly zero at the non-positive integers.
inline double reciprocal_gamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  if (x > 0.0) {
    if (x > 171.0) return std::exp(-std::lgamma(x));
    return 1.0 / std::tgamma(x);
  }
  // Reflection: 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi.
  const double y = 1.0 - x;
  const double frac = x - std::floor(x);
  const double periods = std::floor(x);
  double s = std::sin(pi * frac);
  if (std::fmod(periods, 2.0) != 0.0) s = -s;
  if (y > 171.0) {
    const double lg = std::lgamma(y);
    if (lg > 700.0) return std::copysign(std::numeric_limits<double>::infinity(), s);
    return std::exp(lg) * s / pi;
  }
  return std::tgamma(y) * s / pi;
}

namespace detail {

template <class F>
double jth_sign_change(F&& f, double start, int j) {
  const double step = 0.25 * pi;
  double lo = start;
  double flo = f(lo);
  int found = 0;
  for (int iter = 0; iter < 100000; ++iter) {
    const double hi = lo + step;
    const double fhi = f(hi);
    if ((flo < 0.0) != (fhi < 0.0) || fhi == 0.0) {
      if (++found == j) {
        double a = lo;
        double b = hi;
        double fa = flo;
        for (int k = 0; k < 200 && b - a > 1e-15 * b; ++k) {
          const double mid = 0.5 * (a + b);
          const double fm = f(mid);
          if (fm == 0.0) return mid;
          if ((fa < 0.0) == (fm < 0.0)) {
            a = mid;
            fa = fm;
          } else {
            b = mid;
          }
        }
        return 0.5 * (a + b);
      }
    }
    lo = hi;
    flo = fhi;
  }
  throw std::runtime_error("bessel root search did not terminate");
}

}  // namespace detail

/// j-th positive zero of J_n.
inline double bessel_j_root(int n, int j) {
  detail::require(n >= 0 && j >= 1, "bessel_j_root: need n >= 0, j >= 1");
  // No zero of J_n lies below n; the first bracket starts slightly above 0.
  const double start = n == 0 ? 1e-3 : double(n);
  return detail::jth_sign_change([n](double x) { return bessel_j(n, x); }, start, j);
}

/// j-th positive extremum of J_n (zero of J_n').
inline double bessel_j_extremum(int n, int j) {
  detail::require(n >= 0 && j >= 1, "bessel_j_extremum: need n >= 0, j >= 1");
  const double start = n == 0 ? 1e-3 : double(n) * (1.0 - 1e-9);
  return detail::jth_sign_change([n](double x) { return bessel_j_derivative(n, x); },
                                 start, j);
}

}  // namespace diskrad
