#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "cli.hpp"

using diskrad::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Csv {
  std::vector<std::string> header;  // lines starting with '#'
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      csv.header.push_back(line);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (csv.columns.empty()) {
      csv.columns = cells;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::stod(c));
    csv.rows.push_back(row);
  }
  return csv;
}

std::string header_value(const Csv& csv, const std::string& key) {
  for (const auto& h : csv.header) {
    const auto pos = h.find(key + "=");
    if (pos != std::string::npos && (pos == 2 || pos == 3)) return h.substr(pos + key.size() + 1);
  }
  return {};
}

std::string config_lines(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream cfg;
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("# ", 0) == 0) cfg << line.substr(2) << "\n";
  return cfg.str();
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("diskrad_cli_" + name);
}

}  // namespace

TEST(CliCoeffs, TwentyOneRowsWithFixedRatio) {
  const auto r = invoke({"coeffs", "--n", "2", "--r", "1.25", "--profile", "monomial:0", "--Q", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  EXPECT_EQ(csv.columns, (std::vector<std::string>{"q", "re_u", "im_u"}));
  ASSERT_EQ(csv.rows.size(), 21u);
  EXPECT_NEAR(csv.rows[1][1] / csv.rows[0][1], -2.5, 1e-12);
  EXPECT_EQ(csv.header.front(), "## diskrad coeffs");
}

TEST(CliCoeffs, ZeroProfileGivesZeroRows) {
  const auto r = invoke({"coeffs", "--profile", "constant:0", "--Q", "6"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& row : parse_csv(r.out).rows) {
    EXPECT_EQ(row[1], 0.0);
    EXPECT_EQ(row[2], 0.0);
  }
}

TEST(CliCoeffs, OracleColumnsAgreeAtLowOrder) {
  const auto r = invoke({"coeffs", "--n", "16", "--profile", "monomial:4", "--Q", "12", "--oracle"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  ASSERT_EQ(csv.columns.size(), 5u);
  double scale = 0.0;
  for (const auto& row : csv.rows) scale = std::max(scale, std::hypot(row[3], row[4]));
  for (int q = 0; q <= 10; ++q)
    EXPECT_LT(std::hypot(csv.rows[q][1] - csv.rows[q][3], csv.rows[q][2] - csv.rows[q][4]), 1e-6 * scale) << q;
}

TEST(CliField, LineSumOverlaysDirect) {
  const std::vector<std::string> base{"field", "--n", "8", "--k", "5", "--profile", "besselroot:8:1", "--modes", "11"};
  auto args = base;
  args.insert(args.end(), {"--method", "linesum"});
  const auto a = parse_csv(invoke(args).out);
  args = base;
  args.insert(args.end(), {"--method", "direct"});
  const auto b = parse_csv(invoke(args).out);
  ASSERT_EQ(a.rows.size(), 33u);
  ASSERT_EQ(b.rows.size(), 33u);
  const double ref = std::hypot(b.rows[0][1], b.rows[0][2]);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i][0], b.rows[i][0]);
    EXPECT_LT(std::hypot(a.rows[i][1] - b.rows[i][1], a.rows[i][2] - b.rows[i][2]), 0.01 * ref) << i;
  }
  EXPECT_DOUBLE_EQ(a.rows[0][3], 1.0);
}

TEST(CliField, ZeroProfileGivesZeroColumn) {
  const auto r = invoke({"field", "--n", "2", "--profile", "constant:0", "--nz", "5", "--method", "direct"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& row : parse_csv(r.out).rows) {
    EXPECT_EQ(row[1], 0.0);
    EXPECT_EQ(row[3], 0.0);
  }
}

TEST(CliXspec, ZeroStrengthGivesZeros) {
  const auto r = invoke({"xspec", "--strength", "constant:0", "--nz", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& row : parse_csv(r.out).rows) {
    EXPECT_EQ(row[1], 0.0);
    EXPECT_EQ(row[2], 0.0);
  }
}

TEST(CliXspec, BandWarningAndRejection) {
  auto r = invoke({"xspec", "--k", "2.1", "--nz", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  r = invoke({"xspec", "--k", "3", "--nz", "2"});
  EXPECT_EQ(r.code, 2);
}

TEST(CliCancel, ReductionAndScaleInHeader) {
  const auto r = invoke({"cancel", "--nz", "9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  EXPECT_EQ(csv.columns, (std::vector<std::string>{"z", "orig_dB", "resid_dB"}));
  EXPECT_EQ(csv.rows[0][1], 0.0);
  EXPECT_LE(csv.rows[0][2], -18.0);
  const double zeta = std::stod(header_value(csv, "zeta_re"));
  EXPECT_LT(std::abs(zeta), 0.5 * std::stod(header_value(csv, "primary_sup_norm")));
}

TEST(CliCancel, SelfCancellationHitsFloor) {
  const auto r = invoke({"cancel", "--secondary", "besselextremum:2:2", "--nz", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& row : parse_csv(r.out).rows) EXPECT_EQ(row[2], -200.0);
}

TEST(CliSelftest, QuickReportIsJson) {
  const auto r = invoke({"selftest", "--level", "quick"});
  EXPECT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["level"], "quick");
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_GT(j["checks"].size(), 0u);
  for (const auto& c : j["checks"]) {
    EXPECT_TRUE(c.contains("suite"));
    EXPECT_TRUE(c.contains("passed"));
  }
}

TEST(CliUsage, ExitCodes) {
  EXPECT_EQ(invoke({"--tol", "-1", "coeffs"}).code, 2);
  EXPECT_EQ(invoke({"coeffs", "--tol", "abc"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"nonsense"}).code, 2);
  EXPECT_EQ(invoke({"coeffs", "--r", "0.9"}).code, 2);
  EXPECT_EQ(invoke({"coeffs", "--profile", "wavy:3"}).code, 2);
  EXPECT_EQ(invoke({"field", "--method", "magic"}).code, 2);
  EXPECT_EQ(invoke({"selftest", "--level", "huge"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
  EXPECT_EQ(invoke({"coeffs", "--help"}).code, 0);
}

TEST(CliUsage, NegativeToleranceFromEnvironment) {
  ::setenv("DISKRAD_TOL", "-3", 1);
  const auto r = invoke({"coeffs", "--Q", "2"});
  ::unsetenv("DISKRAD_TOL");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("DISKRAD_TOL"), std::string::npos);
}

TEST(CliUsage, ToleranceFromEnvironmentIsRecorded) {
  ::setenv("DISKRAD_TOL", "1e-7", 1);
  const auto r = invoke({"coeffs", "--Q", "2"});
  ::unsetenv("DISKRAD_TOL");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("# tol=1e-7"), std::string::npos);
}

TEST(CliOutput, Deterministic) {
  const std::vector<std::string> args{"field", "--k", "9", "--nz", "9"};
  EXPECT_EQ(invoke(args).out, invoke(args).out);
  const std::vector<std::string> x{"xspec", "--nz", "5", "--lq", "closedform"};
  EXPECT_EQ(invoke(x).out, invoke(x).out);
}

TEST(CliOutput, HeaderRoundTripsThroughConfig) {
  const auto first = invoke({"--tol", "1e-8", "field", "--n", "2", "--k", "1.5", "--profile", "monomial:2",
                             "--method", "series", "--zmax", "3", "--nz", "4"});
  ASSERT_EQ(first.code, 0) << first.err;
  const auto cfg = temp_file("roundtrip.cfg");
  std::ofstream(cfg) << config_lines(first.out);
  const auto second = invoke({"field", "--config", cfg.string()});
  std::filesystem::remove(cfg);
  ASSERT_EQ(second.code, 0) << second.err;
  EXPECT_EQ(first.out, second.out);
  EXPECT_NE(config_lines(first.out).find("field.method=\"series\""), std::string::npos);
  EXPECT_EQ(config_lines(first.out).find("coeffs."), std::string::npos);
}

TEST(CliOutput, WritesToFile) {
  const auto path = temp_file("out.csv");
  const auto r = invoke({"coeffs", "--Q", "3", "-o", path.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(parse_csv(text.str()).rows.size(), 4u);
  std::filesystem::remove(path);
  EXPECT_EQ(invoke({"coeffs", "-o", "/nonexistent-dir/x.csv"}).code, 1);
}

TEST(CliBinary, ProcessExitCodes) {
  auto status = [](const std::string& args) {
    const int s = std::system((std::string(DISKRAD_EXE) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("coeffs --Q 2"), 0);
  EXPECT_EQ(status("--tol -1 coeffs"), 2);
  EXPECT_EQ(status("nonsense"), 2);
  EXPECT_EQ(status("selftest --level quick"), 0);
}
