#include "maxwalk/study.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "maxwalk/cli.hpp"

using namespace maxwalk;

namespace {

SweepConfig small_sweep() {
  SweepConfig cfg;
  cfg.base_pmf = LatticePmf{1, {{-1, 0.25}, {0, 0.5}, {1, 0.25}}};
  cfg.a_grid = {0.1, 0.05, 0.02};
  cfg.c = 1.0;
  cfg.methods = {Method::geometric_sum};
  cfg.tol = 1e-9;
  return cfg;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << text;
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST(Sweep, RatioTrendsTowardOne) {
  const auto rows = run_sweep(small_sweep());
  ASSERT_EQ(rows.size(), 3u);
  // rows are sorted by ascending a; the gap |ratio - 1| grows with a
  double prev = 0;
  for (const StudyRow& r : rows) {
    EXPECT_EQ(r.y, static_cast<int>(std::floor(r.c / r.a + 0.5)));
    EXPECT_NEAR(r.c, r.a * r.y, 1e-15);
    const double gap = std::abs(r.ratio - 1.0);
    EXPECT_GT(gap, prev);
    prev = gap;
  }
}

TEST(Sweep, EmptyGridGivesEmptyOutput) {
  SweepConfig cfg = small_sweep();
  cfg.a_grid.clear();
  EXPECT_TRUE(run_sweep(cfg).empty());
}

TEST(Sweep, RejectsYBelowOne) {
  SweepConfig cfg = small_sweep();
  cfg.c = 0.04;  // y = round(0.04/0.1) = 0 for the largest a
  EXPECT_THROW(
      {
        try {
          run_sweep(cfg);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), errc::bad_config);
          throw;
        }
      },
      Error);
}

TEST(Sweep, RejectsNonDecreasingGrid) {
  SweepConfig cfg = small_sweep();
  cfg.a_grid = {0.05, 0.1};
  EXPECT_THROW(run_sweep(cfg), Error);
}

TEST(Sweep, DeterministicBytes) {
  SweepConfig cfg = small_sweep();
  cfg.methods = {Method::geometric_sum, Method::monte_carlo};
  cfg.n_paths = 5000;
  cfg.seed = 7;
  const std::string a = to_csv(run_sweep(cfg));
  const std::string b = to_csv(run_sweep(cfg));
  EXPECT_EQ(a, b);
}

TEST(Sweep, SlowGrowthRay) {
  SweepConfig cfg = small_sweep();
  cfg.ray = "slow_growth";
  const auto rows = run_sweep(cfg);
  for (const StudyRow& r : rows)
    EXPECT_EQ(r.y, static_cast<int>(std::ceil(1.0 / std::sqrt(r.a))));
}

TEST(Csv, StudyRoundTripIsByteIdentical) {
  const auto rows = run_sweep(small_sweep());
  const std::string once = to_csv(rows);
  const std::string twice = to_csv(parse_study_csv(once));
  EXPECT_EQ(once, twice);
}

TEST(Csv, Fmt17RoundTripsDoubles) {
  for (double v : {0.1, 1.0 / 3.0, 2.0 / 3.0, 1e-300, 123456.789, 3.0 - std::sqrt(3.0)}) {
    const std::string s = fmt17(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v);
    EXPECT_EQ(fmt17(std::strtod(s.c_str(), nullptr)), s);
  }
}

TEST(Json, DistributionRoundTrip) {
  const LatticePmf pmf{1, {{-1, 0.3}, {0, 0.5}, {1, 0.2}}};
  const LatticePmf back = pmf_from_json(pmf_to_json(pmf));
  EXPECT_EQ(back.span, 1);
  EXPECT_DOUBLE_EQ(back.probs.at(-1), 0.3);
  EXPECT_DOUBLE_EQ(back.probs.at(1), 0.2);
}

TEST(Json, RejectsMalformedOffsets) {
  const auto j = nlohmann::json{{"span", 1}, {"probs", {{"x1", 0.5}, {"-1", 0.5}}}};
  EXPECT_THROW(pmf_from_json(j), Error);
}

TEST(Json, PositivePmfRejectsNonPositiveOffsets) {
  const auto j = nlohmann::json{{"span", 1}, {"probs", {{"0", 0.5}, {"1", 0.5}}}};
  EXPECT_THROW(positive_pmf_from_json(j), Error);
}

TEST(RemainderDriver, UserSuppliedLaw) {
  RemainderScanConfig cfg;
  ConditionedLadderPmf z;
  z.span = 1;
  z.probs = {1.0};
  z.mu = 1.0;
  cfg.z = z;
  cfg.y_grid = {20, 40};
  const auto rows = run_remainder_scan(cfg);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) EXPECT_LE(r.scaled_remainder, 1e-12);
}

TEST(RemainderDriver, LadderLawFromZeroDriftBase) {
  RemainderScanConfig cfg;
  cfg.base_pmf = LatticePmf{1, {{-1, 0.25}, {0, 0.5}, {1, 0.25}}};
  cfg.ladder_tol = 3e-2;
  cfg.y_grid = {20, 40};
  const auto rows = run_remainder_scan(cfg);  // skip-free base: Z is delta_1
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) EXPECT_LE(r.scaled_remainder, 1e-12);
}

TEST(RemainderDriver, RejectsBadS) {
  RemainderScanConfig cfg;
  cfg.base_pmf = LatticePmf{1, {{-1, 0.25}, {0, 0.5}, {1, 0.25}}};
  cfg.y_grid = {20, 40};
  cfg.s = 1.0;
  EXPECT_THROW(run_remainder_scan(cfg), Error);
}

// ---------------------------------------------------------------------------
// CLI behavior through the in-process entry point
// ---------------------------------------------------------------------------

TEST(Cli, UnknownSubcommandExitsOne) {
  EXPECT_EQ(cli_main({"frobnicate"}), 1);
  EXPECT_EQ(cli_main({}), 1);
}

TEST(Cli, MaxdistEmitsCsv) {
  const std::string dist = write_temp(
      "maxwalk_lazy.json", R"({"span":1,"probs":{"-1":0.3,"0":0.5,"1":0.2}})");
  const auto out = (std::filesystem::temp_directory_path() / "maxwalk_out.csv").string();
  ASSERT_EQ(cli_main({"maxdist", "--dist", dist, "--ymax", "5", "--method", "lindley",
                      "--tol", "1e-9", "--out", out}),
            0);
  const std::string text = slurp(out);
  EXPECT_EQ(text.substr(0, 4), "y,p\n");
  const auto lines = std::count(text.begin(), text.end(), '\n');
  EXPECT_EQ(lines, 7);  // header + y = 0..5
}

TEST(Cli, ValidateRejectsPeriodicInput) {
  const std::string dist =
      write_temp("maxwalk_periodic.json", R"({"span":1,"probs":{"-2":0.5,"2":0.5}})");
  EXPECT_EQ(cli_main({"validate", "--dist", dist}), 1);
}

TEST(Cli, SweepDeterministicBytes) {
  const std::string cfg = write_temp("maxwalk_sweep.json", R"({
    "base_pmf": {"span":1, "probs": {"-1":0.25, "0":0.5, "1":0.25}},
    "a_grid": [0.1, 0.05],
    "c": 1.0,
    "methods": ["geometric_sum"],
    "tol": 1e-9,
    "seed": 3
  })");
  const auto out1 = (std::filesystem::temp_directory_path() / "maxwalk_s1.csv").string();
  const auto out2 = (std::filesystem::temp_directory_path() / "maxwalk_s2.csv").string();
  ASSERT_EQ(cli_main({"sweep", "--config", cfg, "--out", out1}), 0);
  ASSERT_EQ(cli_main({"sweep", "--config", cfg, "--out", out2}), 0);
  const std::string t1 = slurp(out1);
  EXPECT_EQ(t1, slurp(out2));
  EXPECT_EQ(t1.substr(0, t1.find('\n')), "a,y,c,method,exact,asymptotic,ratio,err_bound");
}

TEST(Cli, RenewalFromConfig) {
  const std::string cfg = write_temp("maxwalk_renewal.json", R"({
    "z_pmf": {"span":1, "probs": {"1":0.5, "2":0.5}},
    "A": 1.0,
    "n_max": 2
  })");
  const auto out = (std::filesystem::temp_directory_path() / "maxwalk_u.csv").string();
  ASSERT_EQ(cli_main({"renewal", "--config", cfg, "--out", out}), 0);
  const std::string text = slurp(out);
  EXPECT_NE(text.find("2,0.75"), std::string::npos);
}

TEST(Cli, MissingFileIsConfigError) {
  EXPECT_EQ(cli_main({"maxdist", "--dist", "/nonexistent/x.json"}), 1);
}

TEST(Cli, AsymptoticColumns) {
  const std::string dist = write_temp(
      "maxwalk_lazy2.json", R"({"span":1,"probs":{"-1":0.3,"0":0.5,"1":0.2}})");
  const auto out = (std::filesystem::temp_directory_path() / "maxwalk_asym.csv").string();
  ASSERT_EQ(cli_main({"asymptotic", "--dist", dist, "--ymax", "3", "--out", out}), 0);
  const std::string text = slurp(out);
  EXPECT_EQ(text.substr(0, text.find('\n')), "y,local,tail,tail_summed");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
  // local at y = 0 is 2 a span / sigma2
  const auto row0 = split_csv_line(text.substr(text.find('\n') + 1));
  EXPECT_NEAR(std::strtod(row0[1].c_str(), nullptr), 2.0 * 0.1 / 0.49, 1e-12);
}

TEST(Cli, RemainderScanFromConfig) {
  const std::string cfg = write_temp("maxwalk_rem.json", R"({
    "z_pmf": {"span":1, "probs": {"1":0.5, "2":0.5}},
    "y_grid": [20, 40],
    "C": 1.0, "C1": 1.5, "s": 2.0
  })");
  const auto out = (std::filesystem::temp_directory_path() / "maxwalk_rem.csv").string();
  ASSERT_EQ(cli_main({"remainder", "--config", cfg, "--out", out}), 0);
  const std::string text = slurp(out);
  EXPECT_EQ(text.substr(0, text.find('\n')), "y,A_y,direct,leading,scaled_remainder,lemma3_ok");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

TEST(Cli, NumericalFailureExitsTwo) {
  // drift so close to zero that the certified window cannot fit in memory
  const std::string dist = write_temp(
      "maxwalk_tinydrift.json",
      R"({"span":1,"probs":{"-1":0.2500000005,"0":0.5,"1":0.2499999995}})");
  EXPECT_EQ(cli_main({"ladder", "--dist", dist, "--tol", "1e-9"}), 2);
}
