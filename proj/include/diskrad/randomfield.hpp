#pragma once

// Azimuthal components of the cross-spectrum between two field points for
// a statistically axisymmetric random disk source. At low k only the first
// two line-source modes radiate, so each component reduces to four source
// integrals that depend on the observer radii alone.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "diskrad/field.hpp"
#include "diskrad/linesource.hpp"
#include "diskrad/modal.hpp"
#include "diskrad/profile.hpp"
#include "diskrad/quadrature.hpp"
#include "diskrad/specfun.hpp"

namespace diskrad {

/// Gaussian-type coherence: radial scale beta, azimuthal scale alpha.
struct CoherenceModel {
  RadialProfile strength = RadialProfile::constant(1.0);
  double alpha = 1.0;
  double beta = 1.0;

  CoherenceModel() = default;
  CoherenceModel(RadialProfile q, double a, double b) : strength(std::move(q)), alpha(a), beta(b) {
    if (!(alpha > 0.0) || !(beta > 0.0))
      throw std::domain_error("CoherenceModel: alpha and beta must be positive");
  }
};

/// m-th azimuthal component of the coherence kernel,
/// q(a1) q(a2) exp(-(a1-a2)^2/beta^2) e^{-1/alpha^2} I_m(1/alpha^2).
inline double q12_mode(const CoherenceModel& model, int m, double a1, double a2) {
  const double d = (a1 - a2) / model.beta;
  return model.strength(a1) * model.strength(a2) * std::exp(-d * d) *
         bessel_i(m, 1.0 / (model.alpha * model.alpha), true);
}

/// w_m(x) = (1/2pi) sum_q [(2q-1)!!/(2q)!!] [(2m+2q-1)!!/(2m+2q)!!] x^{m+2q+1}.
inline double wm_series(int m, double x, double tol = 1e-16) {
  if (m < 0) throw std::domain_error("wm_series: m must be >= 0");
  if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("wm_series: need 0 <= x < 1");
  if (x == 0.0) return 0.0;
  const double x2 = x * x;
  double power = std::pow(x, m + 1);
  double sum = 0.0;
  for (int q = 0; q < 200; ++q) {
    const double term = detail::half_factorial_ratio(q) * detail::half_factorial_ratio(m + q) * power;
    sum += term;
    if (term <= tol * sum) return sum / (2.0 * pi);
    power *= x2;
  }
  throw ConvergenceError("wm_series: no convergence in 200 terms");
}

inline double vm(int m, double x) { return m == 0 ? x / (2.0 * pi) : 0.0; }

struct CrossSpectrumCoeffs {
  int m = 0;
  double r1 = 0.0;
  double r2 = 0.0;
  complex u00, u01, u10, u11;
  std::size_t evaluations = 0;
};

namespace detail {

inline double phi1(int m, double a, double r) { return 2.0 * wm_series(m, a / r); }
inline double phi2(int m, double a, double r) {
  return 4.0 * (vm(m, a) - r * wm_series(m, a / r));
}

/// Breakpoints at and around the ridge a2 = a1 of a narrow radial kernel.
struct RidgeBreaks {
  double beta;
  std::vector<double> operator()(double a1) const {
    if (beta >= 0.25) return {};
    return {a1 - 6.0 * beta, a1 - beta, a1, a1 + beta, a1 + 6.0 * beta};
  }
};

}  // namespace detail

/// The four integrals
///   u00 = int int Q phi1(a1; r1) phi1(a2; r2),  u01 = int int Q phi2(a1; r1) phi1(a2; r2),
///   u10 = int int Q phi1(a1; r1) phi2(a2; r2),  u11 = int int Q phi2(a1; r1) phi2(a2; r2),
/// with phi1 = 2 w_m(a/r) and phi2 = 4 [v_m(a) - r w_m(a/r)].
inline CrossSpectrumCoeffs xspec_coeffs(const CoherenceModel& model, int m, double r1, double r2,
                                        double tol = 1e-9) {
  if (!(r1 > 1.0 && r2 > 1.0)) throw std::domain_error("xspec_coeffs: radii must exceed 1");
  if (m < 0) throw std::domain_error("xspec_coeffs: m must be >= 0");
  CrossSpectrumCoeffs c;
  c.m = m;
  c.r1 = r1;
  c.r2 = r2;
  if (model.strength.is_zero()) return c;
  QuadOptions opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = tol;
  opt.l1_rel_tol = 0.1 * tol;
  const detail::RidgeBreaks breaks{model.beta};
  auto run = [&](auto basis1, auto basis2) {
    const auto res = integrate_2d(
        [&](double a1, double a2) {
          return q12_mode(model, m, a1, a2) * basis1(m, a1, r1) * basis2(m, a2, r2);
        },
        Rect{0.0, 1.0, 0.0, 1.0}, opt, breaks);
    c.evaluations += res.evaluations;
    return res.value;
  };
  c.u00 = run(detail::phi1, detail::phi1);
  c.u01 = run(detail::phi2, detail::phi1);
  c.u10 = run(detail::phi1, detail::phi2);
  c.u11 = run(detail::phi2, detail::phi2);
  return c;
}

/// Where the two-mode truncation can be trusted.
struct ValidityBand {
  double warn_above = 2.0;
  double fail_above = 2.2;
};

enum class BandStatus { ok, warning, outside };

inline BandStatus validity_band(double k, const ValidityBand& band = {}) {
  if (k > band.fail_above) return BandStatus::outside;
  if (k > band.warn_above) return BandStatus::warning;
  return BandStatus::ok;
}

/// W_12^(m) = L0(2)[u00 L0*(1) + u01 L1*(1)] + L1(2)[u10 L0*(1) + u11 L1*(1)].
inline complex cross_spectrum_mode(const CrossSpectrumCoeffs& c, double k, const Observer& obs1,
                                   const Observer& obs2, const LqPolicy& policy = {},
                                   const ValidityBand& band = {}, WorkCounter* work = nullptr) {
  if (!(k >= 0.0)) throw std::domain_error("cross_spectrum_mode: k must be >= 0");
  if (validity_band(k, band) == BandStatus::outside)
    throw std::domain_error("cross_spectrum_mode: k = " + std::to_string(k) +
                            " is outside the two-mode validity band");
  if (std::abs(obs1.r() - c.r1) > 1e-12 * c.r1 || std::abs(obs2.r() - c.r2) > 1e-12 * c.r2)
    throw std::invalid_argument("cross_spectrum_mode: coefficients were computed for other radii");
  auto lq = [&](int q, const Observer& o) { return lq_auto(q, k, o, policy, work).value; };
  const complex l01 = std::conj(lq(0, obs1));
  const complex l11 = std::conj(lq(1, obs1));
  const complex l02 = lq(0, obs2);
  const complex l12 = lq(1, obs2);
  return l02 * (c.u00 * l01 + c.u01 * l11) + l12 * (c.u10 * l01 + c.u11 * l11);
}

/// Reference value: W = int int Q^(m) conj(R_m(obs1; a1)) R_m(obs2; a2) a1 a2,
/// with the ring fields R_m by quadrature.
inline complex cross_spectrum_oracle(const CoherenceModel& model, int m, double k,
                                     const Observer& obs1, const Observer& obs2,
                                     double tol = 1e-8, WorkCounter* work = nullptr) {
  if (m < 0) throw std::domain_error("cross_spectrum_oracle: m must be >= 0");
  if (model.strength.is_zero()) return {};
  QuadOptions opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = tol;
  opt.l1_rel_tol = 0.1 * tol;
  const double ring_tol = 1e-3 * tol;
  double cached_a1 = -1.0;
  complex cached_ring1{};
  const auto res = integrate_2d(
      [&](double a1, double a2) {
        if (a1 != cached_a1) {
          cached_a1 = a1;
          cached_ring1 = std::conj(ring_field_quadrature(m, k, a1, obs1, ring_tol, work));
        }
        const double w = q12_mode(model, m, a1, a2) * a1 * a2;
        if (w == 0.0) return complex{};
        return w * cached_ring1 * ring_field_quadrature(m, k, a2, obs2, ring_tol, work);
      },
      Rect{0.0, 1.0, 0.0, 1.0}, opt, detail::RidgeBreaks{model.beta});
  if (work) work->add(res.evaluations);
  return res.value;
}

}  // namespace diskrad
