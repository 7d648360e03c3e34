#pragma once

#include <boost/math/special_functions/fpclassify.hpp>  // pchip.hpp uses isnan unqualified
#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "diskrad/specfun.hpp"

namespace diskrad {

/// Radial source strength s_n(a) on the unit disk.
class RadialProfile {
 public:
  struct Constant {
    double value = 1.0;
  };
  struct Monomial {
    double gamma = 0.0;
  };
  /// J_n(c a) with c the index-th zero (or extremum) of J_n.
  struct BesselMode {
    int n = 0;
    int index = 1;
    bool extremum = false;
    double scale = 0.0;
  };
  struct Tabulated {
    std::string source;  // file path, empty when built in memory
    std::vector<double> a;
    std::vector<double> s;
    std::shared_ptr<const boost::math::interpolators::pchip<std::vector<double>>> spline;
  };
  /// sum_i c_i p_i(a).
  struct Combination {
    std::vector<std::pair<double, std::shared_ptr<const RadialProfile>>> terms;
  };
  using Variant = std::variant<Constant, Monomial, BesselMode, Tabulated, Combination>;

  RadialProfile() : v_(Constant{1.0}) {}

  static RadialProfile constant(double value = 1.0) { return RadialProfile(Constant{value}); }
  static RadialProfile monomial(double gamma) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("monomial profile: gamma must be >= 0");
    return RadialProfile(Monomial{gamma});
  }
  static RadialProfile bessel_root(int n, int index) {
    return RadialProfile(BesselMode{n, index, false, bessel_j_root(n, index)});
  }
  static RadialProfile bessel_extremum(int n, int index) {
    return RadialProfile(BesselMode{n, index, true, bessel_j_extremum(n, index)});
  }
  static RadialProfile tabulated(std::vector<double> a, std::vector<double> s,
                                 std::string source = {}) {
    if (a.size() != s.size()) throw std::invalid_argument("tabulated profile: size mismatch");
    if (a.size() < 8) throw std::invalid_argument("tabulated profile: need at least 8 samples");
    if (!std::is_sorted(a.begin(), a.end()) ||
        std::adjacent_find(a.begin(), a.end()) != a.end())
      throw std::invalid_argument("tabulated profile: radii must be strictly increasing");
    if (a.front() > 0.0 || a.back() < 1.0)
      throw std::invalid_argument("tabulated profile: samples must cover [0, 1]");
    for (double x : s)
      if (!std::isfinite(x)) throw std::invalid_argument("tabulated profile: non-finite sample");
    Tabulated t{std::move(source), a, s, nullptr};
    t.spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
        std::move(a), std::move(s));
    return RadialProfile(std::move(t));
  }
  /// c1 p1 + c2 p2.
  static RadialProfile combination(double c1, const RadialProfile& p1, double c2,
                                   const RadialProfile& p2) {
    Combination c;
    c.terms.emplace_back(c1, std::make_shared<const RadialProfile>(p1));
    c.terms.emplace_back(c2, std::make_shared<const RadialProfile>(p2));
    return RadialProfile(std::move(c));
  }

  /// Reads whitespace-separated "a s" pairs; '#' starts a comment.
  static RadialProfile from_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open profile table '" + path + "'");
    std::vector<double> a, s;
    std::string line;
    while (std::getline(in, line)) {
      if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ls(line);
      double x, y;
      if (ls >> x >> y) {
        a.push_back(x);
        s.push_back(y);
      }
    }
    return tabulated(std::move(a), std::move(s), path);
  }

  /// Parses "constant", "constant:<c>", "monomial:<gamma>",
  /// "besselroot:<n>:<j>", "besselextremum:<n>:<j>" or "table:<file>".
  static RadialProfile parse(const std::string& spec) {
    const auto fields = split(spec);
    const std::string& kind = fields[0];
    auto bad = [&] { return std::invalid_argument("bad profile spec '" + spec + "'"); };
    auto number = [&](const std::string& text) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(text, &used);
      } catch (const std::exception&) {
        throw bad();
      }
      if (used != text.size()) throw bad();
      return x;
    };
    auto integer = [&](const std::string& text) {
      const double x = number(text);
      if (x != std::floor(x)) throw bad();
      return static_cast<int>(x);
    };
    if (kind == "constant") {
      if (fields.size() == 1) return constant(1.0);
      if (fields.size() != 2) throw bad();
      return constant(number(fields[1]));
    }
    if (kind == "monomial") {
      if (fields.size() != 2) throw bad();
      return monomial(number(fields[1]));
    }
    if (kind == "besselroot" || kind == "besselextremum") {
      if (fields.size() != 3) throw bad();
      const int n = integer(fields[1]);
      const int j = integer(fields[2]);
      if (n < 0 || j < 1) throw bad();
      return kind == "besselroot" ? bessel_root(n, j) : bessel_extremum(n, j);
    }
    if (kind == "table") {
      if (spec.size() <= 6) throw bad();
      return from_table_file(spec.substr(6));
    }
    throw std::invalid_argument("unknown profile kind '" + kind + "'");
  }

  /// Canonical specification string; parse(spec()) reproduces the profile.
  std::string spec() const {
    return std::visit(
        [](const auto& p) -> std::string {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Constant>) {
            return p.value == 1.0 ? "constant" : "constant:" + format(p.value);
          } else if constexpr (std::is_same_v<T, Monomial>) {
            return "monomial:" + format(p.gamma);
          } else if constexpr (std::is_same_v<T, BesselMode>) {
            return std::string(p.extremum ? "besselextremum:" : "besselroot:") +
                   std::to_string(p.n) + ":" + std::to_string(p.index);
          } else if constexpr (std::is_same_v<T, Tabulated>) {
            return "table:" + (p.source.empty() ? std::string("<memory>") : p.source);
          } else {
            // Not accepted by parse(); combinations are built in code.
            std::string out;
            for (const auto& [c, q] : p.terms)
              out += (out.empty() ? "" : " + ") + format(c) + "*(" + q->spec() + ")";
            return out;
          }
        },
        v_);
  }

  double operator()(double a) const {
    return std::visit(
        [a](const auto& p) -> double {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Constant>) {
            return p.value;
          } else if constexpr (std::is_same_v<T, Monomial>) {
            return p.gamma == 0.0 ? 1.0 : std::pow(a, p.gamma);
          } else if constexpr (std::is_same_v<T, BesselMode>) {
            return bessel_j(p.n, p.scale * a);
          } else if constexpr (std::is_same_v<T, Tabulated>) {
            return (*p.spline)(std::clamp(a, p.a.front(), p.a.back()));
          } else {
            double sum = 0.0;
            for (const auto& [c, q] : p.terms) sum += c * (*q)(a);
            return sum;
          }
        },
        v_);
  }

  bool is_zero() const {
    if (auto c = std::get_if<Constant>(&v_)) return c->value == 0.0;
    if (auto t = std::get_if<Tabulated>(&v_))
      return std::all_of(t->s.begin(), t->s.end(), [](double x) { return x == 0.0; });
    if (auto c = std::get_if<Combination>(&v_))
      return std::all_of(c->terms.begin(), c->terms.end(),
                         [](const auto& t) { return t.first == 0.0 || t.second->is_zero(); });
    return false;
  }

  /// max |s(a)| on [0, 1], sampled.
  double sup_norm() const {
    double m = 0.0;
    for (int i = 0; i <= 2000; ++i) m = std::max(m, std::abs((*this)(i / 2000.0)));
    return m;
  }

  const Variant& variant() const { return v_; }

 private:
  explicit RadialProfile(Variant v) : v_(std::move(v)) {}

  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ':') {
        out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    out.push_back(cur);
    return out;
  }
  static std::string format(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
  }

  Variant v_;
};

}  // namespace diskrad
