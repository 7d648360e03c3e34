// Acceptance run: one [PASS]/[FAIL] line per criterion, each with the
// measured figure of merit and wall time. Exit status is nonzero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "diskrad/field.hpp"
#include "diskrad/linesource.hpp"
#include "diskrad/modal.hpp"
#include "diskrad/randomfield.hpp"
#include "diskrad/selftest.hpp"

using namespace diskrad;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  std::vector<std::string> notes;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // seconds
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double max_norm(const std::vector<complex>& u) {
  double m = 0.0;
  for (const auto& x : u) m = std::max(m, std::abs(x));
  return m;
}

std::vector<RadialProfile> coefficient_profiles(int n) {
  return {RadialProfile::monomial(0), RadialProfile::monomial(2), RadialProfile::monomial(4),
          RadialProfile::bessel_root(n, 1), RadialProfile::bessel_extremum(n, 2)};
}

Outcome coefficient_identity() {
  double worst = 0.0;
  for (int n : {2, 16})
    for (const auto& p : coefficient_profiles(n)) {
      const auto c = line_source_coeffs(n, 1.25, 4, p);
      worst = std::max(worst, std::abs(c.u[1] + 2.5 * c.u[0]) / std::abs(c.u[0]));
    }
  return {worst <= 1e-12, "max |u1/u0 + 2r| = " + fmt("%.2e", worst), {}};
}

Outcome system_vs_oracle() {
  double low = 0.0, mid = 0.0, high = 0.0;
  for (int n : {2, 16})
    for (double gamma : {0.0, 2.0, 4.0}) {
      const auto p = RadialProfile::monomial(gamma);
      const auto sys = line_source_coeffs(n, 1.25, 24, p);
      const auto ora = coeffs_oracle_split(n, 1.25, 24, p);
      const double scale = max_norm(ora.u);
      for (int q = 0; q <= 24; ++q) {
        const double e = std::abs(sys.u[q] - ora.u[q]) / scale;
        if (q <= 10) low = std::max(low, e);
        else if (q <= 16) mid = std::max(mid, e);
        else high = std::max(high, e);
      }
    }
  return {low < 1e-6 && mid < 1e-2,
          "q<=10: " + fmt("%.2e", low) + ", q<=16: " + fmt("%.2e", mid) + ", q<=24: " + fmt("%.2e", high) + " (divergence expected)",
          {}};
}

Outcome tonal_field() {
  Outcome out;
  const auto p = RadialProfile::bessel_root(8, 1);
  const auto c = line_source_coeffs(8, 1.25, 10, p);
  for (double k : {5.0, 9.0}) {
    const TonalSource src(8, p, k);
    const complex ref = field_direct(src, Observer(1.25, 0.0));
    double worst = 0.0;
    for (int i = 0; i <= 32; ++i) {
      const Observer o(1.25, 0.25 * i);
      worst = std::max(worst, std::abs(field_line_sum(c, k, o, 10) - field_direct(src, o)) / std::abs(ref));
    }
    out.ok = out.ok && worst < 0.01;
    out.detail += (out.detail.empty() ? "" : ", ") + std::string("k=") + fmt("%g", k) + ": " + fmt("%.2f%%", 100 * worst);
  }
  return out;
}

Outcome lq_exactness() {
  double worst = 0.0;
  for (int q = 0; q <= 15; ++q)
    for (double k : {0.5, 1.0, 2.0, 5.0, 9.0})
      for (double r : {1.25, 2.0, 5.0}) {
        const complex exact = lq_inplane_exact(q, k, r);
        worst = std::max(worst, std::abs(lq_quadrature(q, k, Observer(r, 0.0)) - exact) / std::abs(exact));
      }
  return {worst < 1e-8, "max relative error " + fmt("%.2e", worst), {}};
}

Outcome radiation_cutoff() {
  // Ratios from quadrature; the closed form gives the frozen threshold check.
  const Observer o(1.25, 0.0);
  std::vector<double> ratio(16);
  const double l0 = std::abs(lq_quadrature(0, 5.0, o));
  for (int q = 0; q <= 15; ++q) ratio[q] = std::abs(lq_quadrature(q, 5.0, o)) / l0;
  bool strict = true;
  for (int q = 5; q < 11; ++q) strict = strict && ratio[q + 1] < ratio[q];
  const double exact14 = std::abs(lq_inplane_exact(14, 5.0, 1.25)) / std::abs(lq_inplane_exact(0, 5.0, 1.25));
  const bool small = ratio[14] < 1e-4 && std::abs(ratio[14] - exact14) < 1e-8 * exact14;
  return {strict && small,
          std::string("strictly decreasing q=5..11: ") + (strict ? "yes" : "no") + ", |L14/L0| = " + fmt("%.3e", ratio[14]),
          {}};
}

Outcome ring_series() {
  double worst = 0.0;
  for (int n = 0; n <= 4; ++n)
    for (double a : {0.3, 0.7, 1.0})
      for (double k : {1.0, 2.0, 5.0})
        for (double r : {1.5, 3.0})
          for (double z : {0.0, 1.0, 3.0}) {
            const Observer o(r, z);
            const complex q = ring_field_quadrature(n, k, a, o);
            worst = std::max(worst, std::abs(ring_field_series(n, k, a, o) - q) / std::abs(q));
          }
  return {worst < 1e-8, "max relative error " + fmt("%.2e", worst), {}};
}

struct Panel {
  const char* name;
  double k;
  int m;
  double alpha, beta;
};

Outcome cross_spectrum() {
  Outcome out;
  const Panel panels[] = {{"a", 1.0, 0, 1.0, 100.0}, {"b", 1.0, 0, 3.0, 0.01}, {"c", 2.0, 1, 1.0, 100.0}, {"d", 2.0, 1, 3.0, 0.01}};
  const Observer o1(1.25, 0.0);
  LqPolicy numeric, closed;
  numeric.mode = LqPolicy::Mode::quadrature;
  closed.mode = LqPolicy::Mode::closed_form;
  for (const auto& p : panels) {
    const CoherenceModel model(RadialProfile::constant(), p.alpha, p.beta);
    const auto c = xspec_coeffs(model, p.m, 1.25, 5.0);
    double en = 0.0, ec = 0.0, ref0 = 0.0;
    for (int i = 0; i <= 16; ++i) {
      const Observer o2(5.0, 0.5 * i);
      const complex ref = cross_spectrum_oracle(model, p.m, p.k, o1, o2);
      if (i == 0) ref0 = std::abs(ref);
      en = std::max(en, std::abs(cross_spectrum_mode(c, p.k, o1, o2, numeric) - ref));
      ec = std::max(ec, std::abs(cross_spectrum_mode(c, p.k, o1, o2, closed) - ref));
    }
    en /= ref0;
    ec /= ref0;
    out.ok = out.ok && en < 0.05 && ec < 0.10;
    out.detail += std::string(out.detail.empty() ? "" : "; ") + p.name + ": numeric " + fmt("%.1f%%", 100 * en) +
                  ", closed " + fmt("%.1f%%", 100 * ec);
  }
  return out;
}

Outcome shape_insensitivity() {
  const Observer o1(1.25, 0.0);
  std::vector<std::vector<complex>> curves;
  for (double beta : {100.0, 0.01}) {
    const auto c = xspec_coeffs(CoherenceModel(RadialProfile::constant(), 1.0, beta), 0, 1.25, 5.0);
    std::vector<complex> w;
    for (int i = 0; i <= 16; ++i) w.push_back(cross_spectrum_mode(c, 1.0, o1, Observer(5.0, 0.5 * i)));
    const complex w0 = w[0];
    for (auto& x : w) x /= w0;
    curves.push_back(w);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < curves[0].size(); ++i) worst = std::max(worst, std::abs(curves[0][i] - curves[1][i]));
  return {worst < 0.10, "max pointwise difference " + fmt("%.2f%%", 100 * worst), {}};
}

Outcome cancellation() {
  const auto pa = RadialProfile::bessel_extremum(2, 2);
  const auto pb = RadialProfile::constant();
  const complex zeta = cancel_scale(line_source_coeffs(2, 1.25, 11, pa), line_source_coeffs(2, 1.25, 11, pb));
  const TonalSource a(2, pa, 1.0), b(2, pb, 1.0);
  const complex ref = field_direct(a, Observer(1.25, 0.0));
  Outcome out;
  const double at0 = decibels(cancel_field(a, b, zeta, Observer(1.25, 0.0)), ref);
  out.ok = at0 <= -18.0;
  out.detail = "residual at z=0: " + fmt("%.2f dB", at0) + ", zeta = " + fmt("%.4f", zeta.real()) +
               " (sup|s_n| = " + fmt("%.3f", pa.sup_norm()) + ")";
  for (double z : {0.5, 1.0, 1.5, 2.0, 4.0}) {
    const Observer o(1.25, z);
    const double orig = decibels(field_direct(a, o), ref);
    const double res = decibels(cancel_field(a, b, zeta, o), ref);
    out.notes.push_back("z=" + fmt("%.1f", z) + ": original " + fmt("%.2f dB", orig) + ", residual " + fmt("%.2f dB", res));
  }
  return out;
}

Outcome property_suites() {
  const auto rep = selftest::run(selftest::Level::full);
  Outcome out;
  out.ok = rep.all_passed();
  int failed = 0;
  for (const auto& c : rep.checks)
    if (!c.passed) {
      ++failed;
      out.notes.push_back(c.suite + " / " + c.name + ": " + c.detail);
    }
  out.detail = std::to_string(rep.checks.size() - failed) + "/" + std::to_string(rep.checks.size()) + " checks green";
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "coefficient identity u1 = -2r u0", 1.0, coefficient_identity},
      {2, "system against projection oracle", 30.0, system_vs_oracle},
      {3, "tonal field, 11 line-source modes", 60.0, tonal_field},
      {4, "L_q quadrature against in-plane closed form", 20.0, lq_exactness},
      {5, "radiation cutoff at k=5", 1.0, radiation_cutoff},
      {6, "ring series against ring quadrature", 60.0, ring_series},
      {7, "two-mode cross-spectrum against oracle", 120.0, cross_spectrum},
      {8, "cross-spectrum shape insensitivity to beta", 120.0, shape_insensitivity},
      {9, "cancellation by constant secondary", 10.0, cancellation},
      {10, "property suites (selftest full)", 300.0, property_suites},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what(), {}};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.time_limit;
    const bool ok = out.ok && in_time;
    if (!ok) ++failures;
    std::printf("[%s] %d %s: %s (%.2f s%s)\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(), out.detail.c_str(), secs,
                in_time ? "" : ", over time limit");
    for (const auto& n : out.notes) std::printf("       %s\n", n.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
