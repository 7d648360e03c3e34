#pragma once

// Command-line front end. run() takes the argument list and the output
// streams so that tests can drive it in-process.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "diskrad/field.hpp"
#include "diskrad/linesource.hpp"
#include "diskrad/modal.hpp"
#include "diskrad/profile.hpp"
#include "diskrad/randomfield.hpp"
#include "diskrad/selftest.hpp"

namespace diskrad::cli {

enum ExitCode { ok = 0, computation_failed = 1, usage_error = 2 };

struct Sweep {
  double zmin = 0.0;
  double zmax = 8.0;
  int nz = 33;

  std::vector<double> points() const {
    std::vector<double> z(nz);
    for (int i = 0; i < nz; ++i) z[i] = nz == 1 ? zmin : zmin + (zmax - zmin) * i / (nz - 1);
    return z;
  }
};

struct Options {
  double tol = 1e-9;
  std::string output;

  struct {
    int n = 2;
    double r = 1.25;
    std::string profile = "monomial:0";
    int Q = 20;
    bool oracle = false;
  } coeffs;

  struct {
    int n = 8;
    double k = 5.0;
    double r = 1.25;
    std::string profile = "besselroot:8:1";
    std::string method = "linesum";
    int modes = 0;  // 0 selects the default truncation for k
    Sweep z;
  } field;

  struct {
    int m = 0;
    double k = 1.0;
    double alpha = 1.0;
    double beta = 100.0;
    double r1 = 1.25;
    double z1 = 0.0;
    double r2 = 5.0;
    std::string lq = "numeric";
    std::string strength = "constant";
    bool oracle = false;
    Sweep z{0.0, 8.0, 17};
  } xspec;

  struct {
    int n = 2;
    double k = 1.0;
    double r = 1.25;
    std::string primary = "besselextremum:2:2";
    std::string secondary = "constant";
    std::string method = "direct";
    Sweep z;
  } cancel;

  struct {
    std::string level = "quick";
  } selftest;
};

/// Numbers in CSV output: shortest form that round-trips.
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x + 0.0);  // + 0.0 folds -0 into 0
  return buf;
}

namespace detail {

inline void add_sweep(CLI::App* sub, Sweep& s) {
  sub->add_option("--zmin", s.zmin, "first axial position")->capture_default_str();
  sub->add_option("--zmax", s.zmax, "last axial position")->capture_default_str();
  sub->add_option("--nz", s.nz, "number of axial positions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

inline CLI::Validator tolerance_check() {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          std::size_t used = 0;
          const double t = std::stod(s, &used);
          if (used == s.size() && t > 0.0 && t <= 0.1) return {};
        } catch (...) {
        }
        return "tolerance must be a number in (0, 0.1], got '" + s + "'";
      },
      "TOL");
}

inline CLI::Validator radius_check() {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          if (std::stod(s) > 1.0) return {};
        } catch (...) {
        }
        return "radius must exceed 1 (the disk radius)";
      },
      "R>1");
}

inline LqPolicy lq_policy(const std::string& name, double tol) {
  LqPolicy p;
  p.tol = std::min(1e-11, tol);
  if (name == "numeric")
    p.mode = LqPolicy::Mode::quadrature;
  else if (name == "closedform")
    p.mode = LqPolicy::Mode::closed_form;
  else if (name == "auto")
    p.mode = LqPolicy::Mode::automatic;
  else
    throw std::invalid_argument("unknown L_q evaluation '" + name + "'");
  return p;
}

/// Resolved configuration of one subcommand as key=value lines: the global
/// options plus the "<command>." keys.
inline std::string resolved_config(const CLI::App& app, const std::string& command) {
  std::istringstream cfg(app.config_to_str(true, false));
  std::ostringstream os;
  std::string line;
  while (std::getline(cfg, line)) {
    const auto eq = line.find('=');
    if (line.empty() || eq == std::string::npos) continue;
    const auto dot = line.substr(0, eq).find('.');
    if (dot == std::string::npos || line.compare(0, dot, command) == 0) os << line << "\n";
  }
  return os.str();
}

/// Header: "## " lines are informational; "# " lines hold the resolved
/// configuration and can be fed back through --config after removing the
/// "# " prefix.
inline std::string header(const CLI::App& app, const std::string& command,
                          const std::vector<std::string>& info) {
  std::ostringstream os;
  os << "## diskrad " << command << "\n";
  for (const auto& line : info) os << "## " << line << "\n";
  std::istringstream cfg(resolved_config(app, command));
  std::string line;
  while (std::getline(cfg, line)) os << "# " << line << "\n";
  return os.str();
}

inline std::string coeffs_csv(const Options& o, const CLI::App& app) {
  const auto& c = o.coeffs;
  const auto profile = RadialProfile::parse(c.profile);
  const auto u = line_source_coeffs(c.n, c.r, c.Q, profile, std::min(1e-12, 1e-3 * o.tol));
  LineSourceCoeffs oracle;
  if (c.oracle) oracle = coeffs_oracle_split(c.n, c.r, c.Q, profile, std::min(1e-12, 1e-3 * o.tol));
  std::ostringstream os;
  os << header(app, "coeffs",
               {"reliable_order=" + std::to_string(u.reliable_order),
                "profile_canonical=" + profile.spec()});
  os << "q,re_u,im_u" << (c.oracle ? ",re_u_oracle,im_u_oracle" : "") << "\n";
  for (int q = 0; q <= c.Q; ++q) {
    os << q << "," << num(u.u[q].real()) << "," << num(u.u[q].imag());
    if (c.oracle) os << "," << num(oracle.u[q].real()) << "," << num(oracle.u[q].imag());
    os << "\n";
  }
  return os.str();
}

inline std::string field_csv(const Options& o, const CLI::App& app) {
  const auto& f = o.field;
  const TonalSource src(f.n, RadialProfile::parse(f.profile), f.k);
  const FieldMethod method = parse_field_method(f.method);
  const int modes = f.modes > 0 ? f.modes : default_truncation(f.k) + 1;
  if (modes > 21) throw std::invalid_argument("at most 21 line-source modes are reliable");
  LineSourceCoeffs coeffs;
  if (method == FieldMethod::linesum)
    coeffs = line_source_coeffs(f.n, f.r, modes - 1, src.profile, std::min(1e-12, 1e-3 * o.tol));
  auto eval = [&](double z) {
    const Observer obs(f.r, z);
    switch (method) {
      case FieldMethod::linesum: return field_line_sum(coeffs, f.k, obs, modes - 1);
      case FieldMethod::direct: return field_direct(src, obs, o.tol);
      case FieldMethod::series: return field_series(src, obs, std::min(o.tol, 1e-10));
      case FieldMethod::hankel: return field_farfield_hankel(src, obs);
    }
    return complex{};
  };
  const complex ref = eval(0.0);
  std::ostringstream os;
  std::vector<std::string> info{"profile_canonical=" + src.profile.spec()};
  if (method == FieldMethod::linesum) info.push_back("modes_used=" + std::to_string(modes));
  os << header(app, "field", info);
  os << "z,re_P,im_P,abs_P_norm\n";
  for (double z : f.z.points()) {
    const complex p = eval(z);
    const double norm = std::abs(ref) > 0.0 ? std::abs(p) / std::abs(ref) : 0.0;
    os << num(z) << "," << num(p.real()) << "," << num(p.imag()) << "," << num(norm) << "\n";
  }
  return os.str();
}

inline std::string xspec_csv(const Options& o, const CLI::App& app, std::ostream& err) {
  const auto& x = o.xspec;
  const CoherenceModel model(RadialProfile::parse(x.strength), x.alpha, x.beta);
  const LqPolicy policy = lq_policy(x.lq, o.tol);
  if (validity_band(x.k) == BandStatus::warning)
    err << "warning: k = " << x.k << " is near the edge of the two-mode validity band\n";
  const auto c = xspec_coeffs(model, x.m, x.r1, x.r2, o.tol);
  const Observer o1(x.r1, x.z1);
  auto eval = [&](double z2) { return cross_spectrum_mode(c, x.k, o1, Observer(x.r2, z2), policy); };
  auto oracle = [&](double z2) {
    return cross_spectrum_oracle(model, x.m, x.k, o1, Observer(x.r2, z2), std::max(o.tol, 1e-9));
  };
  const complex ref = eval(0.0);
  std::ostringstream os;
  os << header(app, "xspec",
               {"u00=" + num(c.u00.real()), "u01=" + num(c.u01.real()),
                "u10=" + num(c.u10.real()), "u11=" + num(c.u11.real())});
  os << "z2,re_W,im_W,abs_W_norm" << (x.oracle ? ",re_W_oracle,im_W_oracle" : "") << "\n";
  for (double z2 : x.z.points()) {
    const complex w = eval(z2);
    const double norm = std::abs(ref) > 0.0 ? std::abs(w) / std::abs(ref) : 0.0;
    os << num(z2) << "," << num(w.real()) << "," << num(w.imag()) << "," << num(norm);
    if (x.oracle) {
      const complex wo = oracle(z2);
      os << "," << num(wo.real()) << "," << num(wo.imag());
    }
    os << "\n";
  }
  return os.str();
}

inline std::string cancel_csv(const Options& o, const CLI::App& app) {
  const auto& c = o.cancel;
  const TonalSource a(c.n, RadialProfile::parse(c.primary), c.k);
  const TonalSource b(c.n, RadialProfile::parse(c.secondary), c.k);
  FieldOptions fo;
  fo.method = parse_field_method(c.method);
  fo.tol = o.tol;
  const int Q = default_truncation(c.k);
  const double btol = std::min(1e-12, 1e-3 * o.tol);
  const complex zeta = cancel_scale(line_source_coeffs(c.n, c.r, Q, a.profile, btol),
                                    line_source_coeffs(c.n, c.r, Q, b.profile, btol));
  const complex ref = evaluate_field(a, Observer(c.r, 0.0), fo);
  std::ostringstream os;
  os << header(app, "cancel",
               {"zeta_re=" + num(zeta.real()), "zeta_im=" + num(zeta.imag()),
                "primary_sup_norm=" + num(a.profile.sup_norm())});
  os << "z,orig_dB,resid_dB\n";
  for (double z : c.z.points()) {
    const Observer obs(c.r, z);
    const complex p = evaluate_field(a, obs, fo);
    const complex res = p - zeta * evaluate_field(b, obs, fo);
    os << num(z) << "," << num(decibels(p, ref)) << "," << num(decibels(res, ref)) << "\n";
  }
  return os.str();
}

inline std::string selftest_json(const Options& o, bool& passed) {
  const auto level = o.selftest.level == "full" ? selftest::Level::full : selftest::Level::quick;
  const auto rep = selftest::run(level);
  nlohmann::json j;
  j["level"] = selftest::to_string(level);
  j["passed"] = rep.all_passed();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : rep.checks)
    j["checks"].push_back({{"suite", c.suite},
                           {"name", c.name},
                           {"passed", c.passed},
                           {"detail", c.detail},
                           {"seconds", c.seconds}});
  passed = rep.all_passed();
  return j.dump(2) + "\n";
}

}  // namespace detail

/// Builds the command tree bound to opt.
inline void configure(CLI::App& app, Options& opt) {
  app.description("Sound fields of circular disk sources via equivalent line sources");
  app.set_config("--config", "", "read key=value options from a file");
  app.add_option("--tol", opt.tol, "quadrature tolerance")
      ->envname("DISKRAD_TOL")
      ->check(detail::tolerance_check())
      ->capture_default_str();
  app.add_option("-o,--output", opt.output, "write output to a file instead of stdout")
      ->configurable(false);
  app.require_subcommand(1);
  app.fallthrough();

  auto* coeffs = app.add_subcommand("coeffs", "line-source coefficients u_q(r)");
  coeffs->add_option("--n", opt.coeffs.n, "azimuthal order")->check(CLI::NonNegativeNumber)->capture_default_str();
  coeffs->add_option("--r", opt.coeffs.r, "observer radius")->check(detail::radius_check())->capture_default_str();
  coeffs->add_option("--profile", opt.coeffs.profile, "radial profile")->capture_default_str();
  coeffs->add_option("--Q", opt.coeffs.Q, "highest mode")->check(CLI::Range(0, 40))->capture_default_str();
  coeffs->add_flag("--oracle", opt.coeffs.oracle, "also compute the projection oracle");

  auto* field = app.add_subcommand("field", "tonal field along an axial line");
  field->add_option("--n", opt.field.n, "azimuthal order")->check(CLI::NonNegativeNumber)->capture_default_str();
  field->add_option("--k", opt.field.k, "wavenumber")->check(CLI::NonNegativeNumber)->capture_default_str();
  field->add_option("--r", opt.field.r, "observer radius")->check(detail::radius_check())->capture_default_str();
  field->add_option("--profile", opt.field.profile, "radial profile")->capture_default_str();
  field->add_option("--method", opt.field.method, "evaluation path")
      ->check(CLI::IsMember({"direct", "linesum", "series", "hankel"}))
      ->capture_default_str();
  field->add_option("--modes", opt.field.modes, "line-source modes (0: automatic)")
      ->check(CLI::Range(0, 21))
      ->capture_default_str();
  detail::add_sweep(field, opt.field.z);

  auto* xspec = app.add_subcommand("xspec", "cross-spectrum of a random disk source");
  xspec->add_option("--m", opt.xspec.m, "azimuthal order")->check(CLI::NonNegativeNumber)->capture_default_str();
  xspec->add_option("--k", opt.xspec.k, "wavenumber")->check(CLI::Range(0.0, 2.2))->capture_default_str();
  xspec->add_option("--alpha", opt.xspec.alpha, "azimuthal coherence scale")->check(CLI::PositiveNumber)->capture_default_str();
  xspec->add_option("--beta", opt.xspec.beta, "radial coherence scale")->check(CLI::PositiveNumber)->capture_default_str();
  xspec->add_option("--r1", opt.xspec.r1, "first observer radius")->check(detail::radius_check())->capture_default_str();
  xspec->add_option("--z1", opt.xspec.z1, "first observer axial position")->capture_default_str();
  xspec->add_option("--r2", opt.xspec.r2, "second observer radius")->check(detail::radius_check())->capture_default_str();
  xspec->add_option("--lq", opt.xspec.lq, "L_q evaluation")
      ->check(CLI::IsMember({"numeric", "closedform", "auto"}))
      ->capture_default_str();
  xspec->add_option("--strength", opt.xspec.strength, "source strength profile q(a)")->capture_default_str();
  xspec->add_flag("--oracle", opt.xspec.oracle, "also compute the quadrature reference");
  detail::add_sweep(xspec, opt.xspec.z);

  auto* cancel = app.add_subcommand("cancel", "cancellation by a scaled secondary source");
  cancel->add_option("--n", opt.cancel.n, "azimuthal order")->check(CLI::NonNegativeNumber)->capture_default_str();
  cancel->add_option("--k", opt.cancel.k, "wavenumber")->check(CLI::NonNegativeNumber)->capture_default_str();
  cancel->add_option("--r", opt.cancel.r, "observer radius")->check(detail::radius_check())->capture_default_str();
  cancel->add_option("--primary", opt.cancel.primary, "primary profile")->capture_default_str();
  cancel->add_option("--secondary", opt.cancel.secondary, "secondary profile")->capture_default_str();
  cancel->add_option("--method", opt.cancel.method, "evaluation path")
      ->check(CLI::IsMember({"direct", "linesum", "series", "hankel"}))
      ->capture_default_str();
  detail::add_sweep(cancel, opt.cancel.z);

  auto* st = app.add_subcommand("selftest", "run the built-in checks and print a JSON report");
  st->add_option("--level", opt.selftest.level, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}))
      ->capture_default_str();
}

/// Runs one invocation; args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"", "diskrad"};
  Options opt;
  configure(app, opt);
  try {
    // CLI11 silently skips environment values that fail validation.
    if (const char* env = std::getenv("DISKRAD_TOL"); env && *env) {
      std::string value = env;
      const std::string msg = detail::tolerance_check()(value);
      if (!msg.empty()) throw CLI::ValidationError("DISKRAD_TOL", msg);
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return usage_error;
  }

  const auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  std::string text;
  int status = ok;
  try {
    // Inputs that only fail on interpretation (profiles, files) are usage
    // errors; everything after that point is computational.
    if (name == "coeffs") RadialProfile::parse(opt.coeffs.profile);
    if (name == "field") RadialProfile::parse(opt.field.profile);
    if (name == "xspec") RadialProfile::parse(opt.xspec.strength);
    if (name == "cancel") {
      RadialProfile::parse(opt.cancel.primary);
      RadialProfile::parse(opt.cancel.secondary);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return usage_error;
  }
  try {
    if (name == "coeffs") text = detail::coeffs_csv(opt, app);
    if (name == "field") text = detail::field_csv(opt, app);
    if (name == "xspec") text = detail::xspec_csv(opt, app, err);
    if (name == "cancel") text = detail::cancel_csv(opt, app);
    if (name == "selftest") {
      bool passed = false;
      text = detail::selftest_json(opt, passed);
      if (!passed) status = computation_failed;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return computation_failed;
  }

  if (opt.output.empty()) {
    out << text;
  } else {
    std::ofstream f(opt.output, std::ios::binary);
    if (!(f << text)) {
      err << "error: cannot write '" << opt.output << "'\n";
      return computation_failed;
    }
  }
  return status;
}

}  // namespace diskrad::cli
