#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration of real- or
// complex-valued integrands, nested 2D integration, and fixed Gauss rules.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace diskrad {

struct QuadResult {
  std::complex<double> value{};
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
  /// Integral of |f|, used for roundoff-aware tolerances.
  double l1_norm = 0.0;
  /// True when the error target fell below the roundoff floor and the
  /// result was accepted at that floor.
  bool roundoff_limited = false;
};

struct QuadOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  /// Accept when error <= l1_rel_tol * integral of |f| (0 disables).
  double l1_rel_tol = 0.0;
  std::size_t max_panels = 10000;

  static QuadOptions with_tol(double tol) { return QuadOptions{tol, tol, 0.0, 10000}; }
  QuadOptions tightened(double factor) const {
    QuadOptions o = *this;
    o.abs_tol *= factor;
    o.rel_tol *= factor;
    o.l1_rel_tol *= factor;
    return o;
  }
};

/// Thrown when the panel budget is exhausted before the tolerance is met.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadResult best)
      : std::runtime_error(what), best_(best) {}
  const QuadResult& best_estimate() const { return best_; }

 private:
  QuadResult best_;
};

/// Non-owning tally of integrand evaluations, threaded through the
/// higher-level routines that want to report work.
struct WorkCounter {
  std::size_t evaluations = 0;
  void add(std::size_t n) { evaluations += n; }
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  std::complex<double> value{};
  double error = 0.0;
  double l1 = 0.0;
};

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<std::complex<double>, 15> fv;
  fv[7] = std::complex<double>(f(center));
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv[j] = std::complex<double>(f(center - dx));
    fv[14 - j] = std::complex<double>(f(center + dx));
  }
  std::complex<double> resk = kWgk[7] * fv[7];
  std::complex<double> resg = kWg[3] * fv[7];
  double resabs = kWgk[7] * std::abs(fv[7]);
  for (int j = 0; j < 7; ++j) {
    const auto pair = fv[j] + fv[14 - j];
    resk += kWgk[j] * pair;
    resabs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    if (j % 2 == 1) resg += kWg[j / 2] * pair;
  }
  const auto mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fv[7] - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));

  const double ahalf = std::abs(half);
  Panel p{a, b, resk * half, std::abs((resk - resg) * half), resabs * ahalf};
  resasc *= ahalf;
  if (resasc != 0.0 && p.error != 0.0)
    p.error = resasc * std::min(1.0, std::pow(200.0 * p.error / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (p.l1 > std::numeric_limits<double>::min() / (50.0 * eps))
    p.error = std::max(50.0 * eps * p.l1, p.error);
  return p;
}

struct PanelOrder {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

}  // namespace detail

/// Globally adaptive integration of f over [a, b] subdivided at the given
/// interior breakpoints. Stops when the summed error estimate is at most
/// max(abs_tol, rel_tol |I|, l1_rel_tol int|f|).
template <class F>
QuadResult integrate_1d(F&& f, std::span<const double> points, const QuadOptions& opt) {
  if (points.size() < 2) throw std::invalid_argument("integrate_1d: need at least two points");
  if (!(opt.abs_tol >= 0.0 && opt.rel_tol >= 0.0 && opt.l1_rel_tol >= 0.0))
    throw std::invalid_argument("integrate_1d: tolerances must be non-negative");
  std::priority_queue<detail::Panel, std::vector<detail::Panel>, detail::PanelOrder> heap;
  std::size_t evaluations = 0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i] < points[i + 1]))
      throw std::invalid_argument("integrate_1d: points must be strictly increasing");
    heap.push(detail::gauss_kronrod_15(f, points[i], points[i + 1]));
    evaluations += 15;
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  auto assemble = [&](bool roundoff) {
    std::vector<detail::Panel> panels;
    panels.reserve(heap.size());
    auto copy = heap;
    while (!copy.empty()) {
      panels.push_back(copy.top());
      copy.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const detail::Panel& x, const detail::Panel& y) { return x.a < y.a; });
    QuadResult r;
    for (const auto& p : panels) {
      r.value += p.value;
      r.abs_error_estimate += p.error;
      r.l1_norm += p.l1;
    }
    r.evaluations = evaluations;
    r.roundoff_limited = roundoff;
    return r;
  };

  // Running totals; the final answer is re-summed in positional order.
  std::complex<double> total{};
  double error = 0.0;
  double l1 = 0.0;
  auto recompute = [&] {
    total = {};
    error = 0.0;
    l1 = 0.0;
    auto copy = heap;
    while (!copy.empty()) {
      total += copy.top().value;
      error += copy.top().error;
      l1 += copy.top().l1;
      copy.pop();
    }
  };
  recompute();
  std::size_t since_recompute = 0;

  for (;;) {
    const double target =
        std::max({opt.abs_tol, opt.rel_tol * std::abs(total), opt.l1_rel_tol * l1});
    const double floor = 100.0 * eps * l1;
    if (error <= target || error <= floor) {
      recompute();
      const double t2 =
          std::max({opt.abs_tol, opt.rel_tol * std::abs(total), opt.l1_rel_tol * l1});
      if (error <= t2) return assemble(false);
      if (error <= 100.0 * eps * l1) return assemble(true);
    }
    if (heap.size() >= opt.max_panels)
      throw QuadratureError("integrate_1d: panel budget exhausted", assemble(false));
    const detail::Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      recompute();
      return assemble(true);
    }
    heap.pop();
    const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
    const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
    evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
    if (++since_recompute == 64) {
      recompute();
      since_recompute = 0;
    }
  }
}

template <class F>
QuadResult integrate_1d(F&& f, double a, double b, const QuadOptions& opt) {
  if (!(a < b)) throw std::invalid_argument("integrate_1d: need a < b");
  const std::array<double, 2> pts{a, b};
  return integrate_1d(f, std::span<const double>(pts), opt);
}

/// Convenience form: tol is used as both the absolute and relative target.
template <class F>
QuadResult integrate_1d(F&& f, double a, double b, double tol = 1e-9) {
  if (!(tol > 0.0)) throw std::invalid_argument("integrate_1d: tol must be positive");
  return integrate_1d(f, a, b, QuadOptions::with_tol(tol));
}

struct Rect {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;
};

struct NoBreaks {
  std::vector<double> operator()(double) const { return {}; }
};

/// Nested integration of f(x, y) over rect: the inner y-integral runs at a
/// tolerance ten times tighter than the outer one. inner_breaks(x) may
/// return interior breakpoints for the y-integral at fixed x.
///
/// With l1_rel_tol > 0 a coarse pass first estimates the integral of |f|
/// over the rectangle, and the outer integral accepts an absolute error of
/// l1_rel_tol times that. Without this floor the outer loop can chase the
/// noise of inner integrals that cancel almost completely.
template <class F, class Breaks = NoBreaks>
QuadResult integrate_2d(F&& f, const Rect& rect, const QuadOptions& opt,
                        Breaks&& inner_breaks = Breaks{}) {
  if (!(rect.x0 < rect.x1 && rect.y0 < rect.y1))
    throw std::invalid_argument("integrate_2d: empty rectangle");
  std::size_t inner_evals = 0;
  double worst_inner = 0.0;
  auto inner_points = [&](double x) {
    std::vector<double> pts{rect.y0};
    for (double p : inner_breaks(x))
      if (p > rect.y0 && p < rect.y1) pts.push_back(p);
    pts.push_back(rect.y1);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  };
  QuadOptions outer_opt = opt;
  if (opt.l1_rel_tol > 0.0) {
    const QuadOptions coarse{0.0, 1e-3, 0.0, opt.max_panels};
    auto abs_outer = [&](double x) {
      const auto pts = inner_points(x);
      auto g = [&](double y) { return std::complex<double>(std::abs(std::complex<double>(f(x, y)))); };
      const QuadResult r = integrate_1d(g, std::span<const double>(pts), coarse);
      inner_evals += r.evaluations;
      return r.value;
    };
    const QuadResult l1 = integrate_1d(abs_outer, rect.x0, rect.x1, coarse);
    outer_opt.abs_tol = std::max(opt.abs_tol, opt.l1_rel_tol * l1.value.real());
  }
  const QuadOptions inner = outer_opt.tightened(0.1);
  auto outer = [&](double x) {
    const auto pts = inner_points(x);
    auto g = [&](double y) { return std::complex<double>(f(x, y)); };
    const QuadResult r = integrate_1d(g, std::span<const double>(pts), inner);
    inner_evals += r.evaluations;
    worst_inner = std::max(worst_inner, r.abs_error_estimate);
    return r.value;
  };
  QuadResult r = integrate_1d(outer, rect.x0, rect.x1, outer_opt);
  r.evaluations = inner_evals;
  r.abs_error_estimate += (rect.x1 - rect.x0) * worst_inner;
  return r;
}

template <class F>
QuadResult integrate_2d(F&& f, const Rect& rect, double tol = 1e-9) {
  if (!(tol > 0.0)) throw std::invalid_argument("integrate_2d: tol must be positive");
  return integrate_2d(f, rect, QuadOptions::with_tol(tol));
}

struct QuadNode {
  double node = 0.0;
  double weight = 0.0;
};

/// Gauss-Chebyshev rule of the second kind: sum w_j f(s_j) approximates
/// int_{-1}^{1} f(s) sqrt(1-s^2) ds, exact for polynomials of degree 2N-1.
inline std::vector<QuadNode> chebyshev2_nodes(int n) {
  if (n < 1) throw std::invalid_argument("chebyshev2_nodes: N must be >= 1");
  std::vector<QuadNode> out;
  out.reserve(n);
  const double h = std::numbers::pi / (n + 1);
  for (int j = 1; j <= n; ++j) {
    const double s = std::sin(j * h);
    // cos(j h) is evaluated as sin(pi/2 - j h) to keep the middle node at 0.
    out.push_back({std::sin(0.5 * std::numbers::pi - j * h), h * s * s});
  }
  return out;
}

/// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
inline std::vector<QuadNode> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  std::vector<QuadNode> out(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    out[i] = {-x, w};
    out[n - 1 - i] = {x, w};
  }
  if (n % 2 == 1) out[n / 2].node = 0.0;
  return out;
}

}  // namespace diskrad
