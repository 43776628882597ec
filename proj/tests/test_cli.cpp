#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "bcsgap/json_io.hpp"
#include "bcsgap/sweep.hpp"
#include "bcsgap/verify.hpp"

using namespace bcsgap;

namespace {

const Potential& gauss() {
  static const Potential p = make_potential(Family::Gaussian, 1.0, 1.0);
  return p;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

TEST(MuRange, Parsing) {
  const std::vector<double> m = parse_mu_range("0.1:0.001:3");
  ASSERT_EQ(m.size(), 3u);
  EXPECT_DOUBLE_EQ(m[0], 0.1);
  EXPECT_NEAR(m[1], 0.01, 1e-15);
  EXPECT_DOUBLE_EQ(m[2], 0.001);
  EXPECT_TRUE(parse_mu_range("0.1:0.01:0").empty());
  EXPECT_EQ(parse_mu_range("0.1:0.01:1"), std::vector<double>{0.1});
  EXPECT_THROW(parse_mu_range("0.1:0.01"), InvalidArgument);
  EXPECT_THROW(parse_mu_range("0.1:x:3"), InvalidArgument);
  EXPECT_THROW(parse_mu_range("0.1:0.01:-2"), InvalidArgument);
  EXPECT_THROW(parse_mu_range("-0.1:0.01:2"), InvalidArgument);
}

TEST(Sweep, EmptyList) {
  int calls = 0;
  EXPECT_TRUE(sweep(gauss(), {}, {}, [&](const SweepRow&) { ++calls; }).empty());
  EXPECT_EQ(calls, 0);
}

TEST(Sweep, RowsInOrderWithFailureIsolation) {
  const double below = 0.5 * mu_floor(scattering_length(gauss()));
  const std::vector<double> mus{0.2, below, 0.05};
  SweepOptions o;
  o.threads = 2;
  std::vector<double> seen;
  const std::vector<SweepRow> rows = sweep(gauss(), mus, o, [&](const SweepRow& r) { seen.push_back(r.mu); });
  EXPECT_EQ(seen, mus);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_TRUE(rows[0].ok()) << rows[0].status;
  EXPECT_EQ(rows[1].status.rfind("error: ", 0), 0u);
  EXPECT_NE(rows[1].status.find("mu_min"), std::string::npos);
  EXPECT_TRUE(rows[2].ok()) << rows[2].status;
  EXPECT_GT(rows[2].tc, 0.0);
  EXPECT_NEAR(rows[2].ratio, rows[2].xi / rows[2].tc, 1e-15);
  EXPECT_NEAR(rows[0].m_mu, rows[0].m_mu_direct, 1e-6 * rows[0].m_mu);
}

TEST(Sweep, CsvLayoutAndDeterminism) {
  auto render = [] {
    std::ostringstream os;
    write_sweep_csv_header(os);
    SweepOptions o;
    o.threads = 1;
    sweep(gauss(), {0.2, 0.1}, o, [&](const SweepRow& r) { write_sweep_csv_row(os, r); });
    return os.str();
  };
  const std::string a = render(), b = render();
  EXPECT_EQ(a, b);
  std::istringstream in(a);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# bcsgap sweep v1");
  std::getline(in, line);
  const std::vector<std::string> header = split(line);
  ASSERT_EQ(header.size(), 19u);
  EXPECT_EQ(header.front(), "mu");
  EXPECT_EQ(header[7], "D");
  EXPECT_EQ(header.back(), "status");
  int rows = 0;
  while (std::getline(in, line)) {
    const std::vector<std::string> cells = split(line);
    ASSERT_EQ(cells.size(), header.size()) << line;
    EXPECT_EQ(cells.back(), "ok");
    EXPECT_EQ(cells[17], "nan");  // HS ratio not requested
    ++rows;
  }
  EXPECT_EQ(rows, 2);
}

TEST(Sweep, JsonRowFields) {
  SweepRow r;
  r.mu = 0.1;
  r.status = "error: x";
  const json j = to_json(r);
  EXPECT_EQ(j.at("mu").get<double>(), 0.1);
  EXPECT_TRUE(j.at("delta_fermi").is_null());
  EXPECT_EQ(j.at("status").get<std::string>(), "error: x");
}

TEST(Sweep, DiagnosticApproachesConstantTowardFloor) {
  const double a = scattering_length(gauss());
  const std::vector<double> mus = geometric_mu_list(0.3, mu_floor(a) * (1.0 + 1e-9), 6);
  const std::vector<SweepRow> rows = sweep(gauss(), mus);
  std::vector<double> gaps;
  for (const auto& r : rows) {
    ASSERT_TRUE(r.ok()) << r.mu << " " << r.status;
    gaps.push_back(std::abs(r.D - r.D_target));
  }
  const std::size_t n = gaps.size();
  EXPECT_LT(gaps[n - 1], gaps[n - 2]);
  EXPECT_LT(gaps[n - 2], gaps[n - 3]);
}

TEST(Verify, QuickProfilePasses) {
  VerifyConfig cfg;
  cfg.golden_path = BCSGAP_GOLDEN_DEFAULT;
  const VerifyReport rep = verify(cfg, Profile::Quick);
  for (const auto& e : rep.entries) EXPECT_TRUE(e.pass) << e.criterion << " " << e.name << " " << e.detail;
  EXPECT_TRUE(rep.overall());
  for (int c : {1, 2, 3, 0}) EXPECT_TRUE(rep.criterion_pass(c)) << c;
  const json j = to_json(rep);
  EXPECT_TRUE(j.at("overall").get<bool>());
  EXPECT_EQ(j.at("profile").get<std::string>(), "quick");
}

TEST(Verify, TamperedGoldenFails) {
  std::ifstream in(BCSGAP_GOLDEN_DEFAULT);
  nlohmann::json doc = nlohmann::json::parse(in);
  for (auto& v : doc["values"])
    if (v["name"] == "xi gaussian:1:1 mu=0.1") v["value"] = v["value"].get<double>() * (1.0 + 1e-6);
  const std::string path = testing::TempDir() + "tampered_golden.json";
  std::ofstream(path) << doc.dump(2);
  const std::vector<VerifyEntry> e = verify_golden(path);
  bool any_fail = false;
  for (const auto& x : e) any_fail |= !x.pass;
  EXPECT_TRUE(any_fail);
  EXPECT_FALSE(verify_golden(testing::TempDir() + "does_not_exist.json").front().pass);
  std::remove(path.c_str());
}
