#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <random>

#include "critwave/energy.hpp"
#include "critwave/error.hpp"
#include "critwave/io.hpp"

using namespace critwave;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "critwave_test_io";
  fs::create_directories(dir);
  return dir / name;
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::invalid_parameter;
}

}  // namespace

TEST(FormatDouble, RoundTripsExactly) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> e(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::pow(10.0, e(rng)) * (i % 2 ? -1 : 1) * 1.2345678901234567;
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(1.0), "1");
}

TEST(SnapshotCsv, RoundTrip) {
  auto mesh = std::make_shared<const RadialMesh>(RadialMesh::uniform(0.05, 5.0));
  const FieldState f = FieldState::from_functions(
      mesh, [](double r) { return std::exp(-r * r) / 3.0; }, [](double r) { return std::sin(r) / (1 + r); });
  const fs::path path = scratch("snap.csv");
  write_snapshot_csv(path, f);
  EXPECT_EQ(read_text(path).substr(0, 7), "r,u,ut\n");
  EXPECT_EQ(count_rows(path), mesh->size());
  const FieldState g = read_snapshot_csv(path, 0.25);
  EXPECT_EQ(g.t, 0.25);
  ASSERT_EQ(g.size(), f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_EQ(g.mesh->r(i), mesh->r(i));
    EXPECT_NEAR(g.h[i], f.h[i], 1e-15 * (1 + std::abs(f.h[i])));
    EXPECT_NEAR(g.p[i], f.p[i], 1e-15 * (1 + std::abs(f.p[i])));
  }
  EXPECT_NEAR(energy(g).total_energy, energy(f).total_energy, 1e-13);
  EXPECT_EQ(snapshot_csv(g), snapshot_csv(f));
}

TEST(SnapshotCsv, RejectsMalformed) {
  const fs::path bad_header = scratch("bad_header.csv");
  write_text(bad_header, "r,u\n0,1\n");
  EXPECT_EQ(code_of([&] { read_snapshot_csv(bad_header); }), Errc::invalid_data);
  const fs::path bad_cell = scratch("bad_cell.csv");
  write_text(bad_cell, "r,u,ut\n0,1,0\n0.1,x,0\n");
  EXPECT_EQ(code_of([&] { read_snapshot_csv(bad_cell); }), Errc::invalid_data);
  EXPECT_EQ(code_of([&] { read_text(scratch("does_not_exist.csv")); }), Errc::io_error);
}

TEST(BreakpointCsv, RoundTrip) {
  std::mt19937_64 rng(99);
  const PiecewiseData d = random_piecewise(rng);
  const fs::path path = scratch("bp.csv");
  write_breakpoint_csv(path, d);
  const PiecewiseData e = read_breakpoint_csv(path);
  EXPECT_EQ(e.s, d.s);
  EXPECT_EQ(e.f0, d.f0);
  EXPECT_EQ(e.f1, d.f1);
  EXPECT_EQ(count_rows(path), d.s.size());
}

TEST(Config, KeyValueAndJsonAgree) {
  const RunConfig a = parse_config(
      "# comment\n"
      "mesh.h = 0.01\n"
      "mesh.rmax = 30\n"
      "t_end = 2.5\n"
      "nonlinear = false\n"
      "data.family = bump\n"
      "data.amp = 0.3\n"
      "seed = 17\n"
      "diagnostics.g_radii = 2, 4\n");
  const RunConfig b = parse_config(R"({
    "mesh": {"h": 0.01, "rmax": 30},
    "t_end": 2.5, "nonlinear": false,
    "data": {"family": "bump", "amp": 0.3},
    "seed": 17,
    "diagnostics": {"g_radii": [2, 4]}
  })");
  EXPECT_EQ(a.h, 0.01);
  EXPECT_EQ(a.r_max, 30.0);
  EXPECT_FALSE(a.nonlinear);
  EXPECT_EQ(a.seed, 17u);
  EXPECT_EQ(a.diagnostics.g_radii, (std::vector<double>{2.0, 4.0}));
  EXPECT_EQ(canonical_config(a), canonical_config(b));
  EXPECT_EQ(config_hash(a), config_hash(b));
}

TEST(Config, Errors) {
  EXPECT_EQ(code_of([] { parse_config("mesh.hh = 0.1\n"); }), Errc::invalid_config);
  EXPECT_EQ(code_of([] { parse_config("mesh.h 0.1\n"); }), Errc::invalid_config);
  EXPECT_EQ(code_of([] { parse_config("mesh.h = abc\n"); }), Errc::invalid_config);
  EXPECT_EQ(code_of([] { parse_config("seed = -3\n"); }), Errc::invalid_config);
  EXPECT_EQ(code_of([] { parse_config(R"({"mesh": {"h": 0.1, "bogus": 1}})"); }), Errc::invalid_config);
  EXPECT_EQ(code_of([] { parse_config("{ not json"); }), Errc::invalid_config);
  // a missing file is a configuration error, not an I/O error
  EXPECT_EQ(code_of([] { load_config(scratch("missing.cfg")); }), Errc::invalid_config);
}

TEST(Config, CanonicalRoundTripAndHash) {
  RunConfig c;
  c.h = 0.005;
  c.data.delta = -0.1;
  c.data.lambda = 1.0 / 3.0;
  c.diagnostics.rho_radii = {1.5, 8.0};
  const RunConfig d = parse_config(canonical_config(c));
  EXPECT_EQ(canonical_config(d), canonical_config(c));
  EXPECT_EQ(config_hash(d), config_hash(c));
  // stable across processes and builds
  EXPECT_EQ(hex64(config_hash(RunConfig{})), hex64(config_hash(parse_config(canonical_config(RunConfig{})))));
  RunConfig e = c;
  e.seed = 1;
  EXPECT_NE(config_hash(e), config_hash(c));
  EXPECT_EQ(hex64(0), "0000000000000000");
  EXPECT_EQ(hex64(0xdeadbeefULL), "00000000deadbeef");
}

TEST(Config, FnvOfCanonicalText) {
  const std::string text = canonical_config(RunConfig{});
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  EXPECT_EQ(config_hash(RunConfig{}), h);
}

TEST(SeriesCsv, HeaderAndRows) {
  DiagnosticsSeries s;
  s.options.g_radii = {2.0, 4.0};
  s.options.ball_radii = {1.0};
  s.options.rho_radii = {4.0};
  DiagnosticsRow row;
  row.t = 0.5;
  row.energy = 4.25;
  row.mu = 0.125;
  row.g = {1.0, 2.0};
  row.ball = {3.0};
  row.rho = {0.25};
  s.rows.push_back(row);
  const std::string csv = series_csv(s);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,E,sup_u,mu,nu,lambda1,f,z1,z2,Z,d,g_2,g_4");
  EXPECT_EQ(csv.substr(csv.find('\n') + 1), "0.5,4.25,0,0.125,,,,0,0,0,0,1,2\n");
  const std::string tails = tails_csv(s);
  EXPECT_EQ(tails, "t,ball_1,rho_4\n0.5,3,0.25\n");
}

TEST(Json, ReportDecompositionManifest) {
  RunReport r;
  r.outcome = Outcome::blowup_detected;
  r.t_star = 1.5;
  r.steps = 10;
  const json jr = json::parse(report_json(r, RunConfig{}));
  EXPECT_EQ(jr["outcome"], "BlowUpDetected");
  EXPECT_EQ(jr["t_star"], 1.5);
  EXPECT_TRUE(jr["contamination_time"].is_null());

  ProfileDecomposition d;
  d.profiles.push_back({-1, 0.5, -0.98});
  d.profiles.push_back({1, 1e-3, 1.01});
  const json jd = json::parse(decomposition_json(d, PythagoreanDefects{}));
  ASSERT_EQ(jd["profiles"].size(), 2u);
  EXPECT_EQ(jd["profiles"][0]["iota"], -1);
  EXPECT_EQ(jd["profiles"][1]["lambda"], 1e-3);
  EXPECT_EQ(jd["orthogonality"].size(), 2u);

  ExperimentManifest m;
  m.config_hash = 0x1234;
  m.outcome = "Completed";
  m.files.push_back({"series.csv", 11});
  const json jm = json::parse(manifest_json(m));
  EXPECT_EQ(jm["config_hash"], "0000000000001234");
  EXPECT_EQ(jm["files"][0]["rows"], 11);
}
