#include "critwave_cli/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "critwave/analysis.hpp"
#include "critwave/dalembert.hpp"
#include "critwave/error.hpp"
#include "critwave/io.hpp"
#include "critwave/profiles.hpp"
#include "critwave/solver.hpp"

namespace fs = std::filesystem;

namespace critwave::cli {

namespace {

struct Globals {
  std::string config;
  std::string out;
  unsigned jobs = 1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool quiet = false;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path out_dir(const Globals& g) {
  if (!g.out.empty()) return g.out;
  if (const char* env = std::getenv("CRITWAVE_OUT"); env && *env) return env;
  return "critwave_out";
}

std::string frame_name(std::size_t k) {
  std::ostringstream name;
  name << "frame_" << std::setw(5) << std::setfill('0') << k << ".csv";
  return name.str();
}

// Writes all run artifacts into dir and returns the outcome string.
std::string write_run(const fs::path& dir, const RunConfig& config, const RunReport& report,
                      const std::string& started) {
  ExperimentManifest manifest;
  manifest.config_hash = config_hash(config);
  manifest.tool_version = version();
  manifest.started = started;

  std::string index = "index,t,file\n";
  for (std::size_t k = 0; k < report.snapshots.size(); ++k) {
    const std::string rel = "snapshots/" + frame_name(k);
    write_snapshot_csv(dir / rel, report.snapshots[k]);
    index += std::to_string(k) + "," + format_double(report.snapshots[k].t) + "," + frame_name(k) + "\n";
    manifest.files.push_back({rel, report.snapshots[k].size()});
  }
  write_text(dir / "snapshots/index.csv", index);
  manifest.files.push_back({"snapshots/index.csv", report.snapshots.size()});
  write_text(dir / "series.csv", series_csv(report.series));
  manifest.files.push_back({"series.csv", report.series.rows.size()});
  write_text(dir / "tails.csv", tails_csv(report.series));
  manifest.files.push_back({"tails.csv", report.series.rows.size()});
  write_text(dir / "config.txt", canonical_config(config));
  manifest.files.push_back({"config.txt", 0});
  write_text(dir / "report.json", report_json(report, config));
  manifest.files.push_back({"report.json", 0});
  manifest.outcome = to_string(report.outcome);
  manifest.finished = utc_now();
  write_text(dir / "manifest.json", manifest_json(manifest));
  return manifest.outcome;
}

RunConfig load_with_overrides(const Globals& g) {
  if (g.config.empty()) throw Error(Errc::invalid_config, "--config is required");
  RunConfig config = load_config(g.config);
  if (g.seed_given) config.seed = g.seed;
  return config;
}

int cmd_simulate(const Globals& g, std::ostream& out) {
  const std::string started = utc_now();
  const RunConfig config = load_with_overrides(g);
  const RunReport report = run(config);
  const fs::path dir = out_dir(g);
  const std::string outcome = write_run(dir, config, report, started);
  if (!g.quiet) {
    out << "outcome " << outcome;
    if (report.outcome == Outcome::blowup_detected) out << " t_star " << format_double(report.t_star);
    out << " frames " << report.snapshots.size() << " -> " << dir.string() << "\n";
  }
  return kOk;
}

struct DalembertArgs {
  std::size_t n = 1000;
  std::string input;
  double t = 0.0;
  std::string output;
};

int cmd_dalembert_check(const Globals& g, const DalembertArgs& a, std::ostream& out) {
  const ChannelBatchResult res = channel_batch(a.n, g.seed);
  if (!g.quiet) {
    out << "cases " << res.cases << " degenerate_skipped " << res.degenerate << " failures " << res.failures
        << " worst_min_ratio " << (res.cases ? format_double(res.worst_min_ratio) : std::string("none")) << "\n";
  }
  return res.failures == 0 ? kOk : kChannelFailure;
}

int cmd_dalembert_evolve(const Globals& g, const DalembertArgs& a, std::ostream& out) {
  if (a.input.empty()) throw Error(Errc::invalid_config, "evolve: --input is required");
  const PiecewiseData data = read_breakpoint_csv(a.input);
  PiecewiseData state;
  if (!data.empty()) state = build_F(data).state_at(a.t);
  const fs::path target = a.output.empty() ? out_dir(g) / "evolved.csv" : fs::path(a.output);
  write_breakpoint_csv(target, state);
  if (!g.quiet) out << "wrote " << state.s.size() << " rows -> " << target.string() << "\n";
  return kOk;
}

std::vector<FieldState> load_frames(const fs::path& dir) {
  const std::string text = read_text(dir / "index.csv");
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<FieldState> frames;
  MeshPtr mesh;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string idx, t, file;
    std::getline(row, idx, ',');
    std::getline(row, t, ',');
    std::getline(row, file, ',');
    FieldState f = read_snapshot_csv(dir / file, std::stod(t));
    if (mesh && mesh->size() == f.mesh->size()) f.mesh = mesh;
    mesh = f.mesh;
    frames.push_back(std::move(f));
  }
  if (frames.empty()) throw Error(Errc::invalid_input, "no snapshots in " + dir.string());
  return frames;
}

struct AnalyzeArgs {
  std::string input;
  double t_est = -1.0;
  bool linear = false;
};

int cmd_analyze(const Globals& g, const AnalyzeArgs& a, std::ostream& out) {
  if (a.input.empty()) throw Error(Errc::invalid_config, "analyze: --input is required");
  fs::path dir = a.input;
  if (fs::exists(dir / "snapshots" / "index.csv")) dir = dir / "snapshots";
  const std::vector<FieldState> frames = load_frames(dir);
  const bool nonlinear = !a.linear;
  DiagnosticsOptions opts;
  if (!g.config.empty()) opts = load_config(g.config).diagnostics;

  std::vector<const FieldState*> regular(frames.size(), nullptr);
  SingularSplit split;
  if (a.t_est > 0.0) {
    SplitOptions so;
    so.nonlinear = nonlinear;
    split = singular_part(frames, a.t_est, so);
    for (std::size_t k = 0; k < split.v.size(); ++k) regular[split.first_frame + k] = &split.v[k];
  }
  const DiagnosticsSeries series = diagnostics_series(frames, regular, opts, nonlinear);
  const fs::path target = out_dir(g);
  write_text(target / "series.csv", series_csv(series));
  write_text(target / "tails.csv", tails_csv(series));
  if (frames.size() >= 3) {
    const VirialSeries vs = virial_series(frames, {}, nonlinear);
    std::string csv = "t,z1,z2,Z,dz1,dz2,dZ,rhs1,rhs2,rhsZ\n";
    for (const auto& p : vs.points) {
      csv += format_double(p.t) + "," + format_double(p.z1) + "," + format_double(p.z2) + "," + format_double(p.Z) +
             "," + format_double(p.dz1) + "," + format_double(p.dz2) + "," + format_double(p.dZ) + "," +
             format_double(p.rhs1) + "," + format_double(p.rhs2) + "," + format_double(p.rhsZ) + "\n";
    }
    write_text(target / "virial.csv", csv);
  }
  if (!g.quiet) out << "analyzed " << frames.size() << " frames -> " << target.string() << "\n";
  return kOk;
}

struct ProfilesArgs {
  std::string input;
  ExtractConfig config;
};

int cmd_profiles(const Globals& g, const ProfilesArgs& a, std::ostream& out) {
  if (a.input.empty()) throw Error(Errc::invalid_config, "profiles: --input is required");
  const FieldState field = read_snapshot_csv(a.input);
  const ProfileDecomposition d = extract(field, a.config);
  const PythagoreanDefects defects = pythagorean_check(field, d);
  const fs::path target = out_dir(g) / "decomposition.json";
  write_text(target, decomposition_json(d, defects));
  if (!g.quiet) {
    out << "profiles " << d.profiles.size() << (d.over_budget ? " (over budget)" : "") << " -> " << target.string()
        << "\n";
  }
  return kOk;
}

struct SweepArgs {
  std::string param = "data.delta";
  std::vector<std::string> values;
};

int cmd_sweep(const Globals& g, const SweepArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig base = load_with_overrides(g);
  if (a.values.empty()) throw Error(Errc::invalid_config, "sweep: --values is required");
  // Validate every cell up front so a bad grid is a config error.
  std::vector<RunConfig> cells;
  for (const auto& v : a.values) {
    RunConfig c = base;
    set_config_value(c, a.param, v);
    c.validate();
    cells.push_back(c);
  }
  struct CellResult {
    bool ok = false;
    std::string outcome;
    double t_star = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> nu_hat;
    std::string error;
  };
  std::vector<CellResult> results(cells.size());
  const fs::path root = out_dir(g);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      CellResult& r = results[i];
      try {
        const std::string started = utc_now();
        const RunReport report = run(cells[i]);
        std::ostringstream name;
        name << "cell_" << std::setw(3) << std::setfill('0') << i;
        r.outcome = write_run(root / name.str(), cells[i], report, started);
        r.t_star = report.t_star;
        if (report.outcome == Outcome::blowup_detected) {
          std::vector<double> ts, ls;
          for (const auto& row : report.series.rows) {
            if (row.lambda1) {
              ts.push_back(row.t);
              ls.push_back(*row.lambda1);
            }
          }
          try {
            r.nu_hat = fit_exponent(ts, ls, report.t_star - 0.5 * cells[i].output_every).nu_hat;
          } catch (const Error&) {
          }
        }
        r.ok = true;
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(g.jobs, static_cast<unsigned>(cells.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::string csv = "cell," + a.param + ",outcome,t_star,nu_hat\n";
  std::size_t succeeded = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const CellResult& r = results[i];
    if (r.ok) ++succeeded;
    else err << "cell " << i << " failed: " << r.error << "\n";
    csv += std::to_string(i) + "," + a.values[i] + "," + (r.ok ? r.outcome : "Failed") + "," +
           (std::isfinite(r.t_star) ? format_double(r.t_star) : "") + "," +
           (r.nu_hat ? format_double(*r.nu_hat) : "") + "\n";
  }
  write_text(root / "aggregate.csv", csv);
  if (!g.quiet) out << "sweep " << succeeded << "/" << cells.size() << " cells -> " << root.string() << "\n";
  return succeeded > 0 ? kOk : kRuntimeFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"critwave: radial energy-critical wave laboratory", "critwave"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "configuration file (key = value or JSON)");
  app.add_option("--out", g.out, "output directory (default $CRITWAVE_OUT or ./critwave_out)");
  app.add_option("--jobs", g.jobs, "worker threads for sweep")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", g.seed, "random seed");
  app.add_flag("--quiet", g.quiet, "suppress progress output");

  auto* simulate = app.add_subcommand("simulate", "run the solver on a configuration");
  simulate->fallthrough();

  DalembertArgs da;
  auto* dalembert = app.add_subcommand("dalembert", "exact 1D reduction tools");
  dalembert->fallthrough();
  dalembert->require_subcommand(1);
  auto* check = dalembert->add_subcommand("check", "random channel-of-energy checks");
  check->fallthrough();
  check->add_option("--n", da.n, "number of random cases");
  auto* evolve = dalembert->add_subcommand("evolve", "evolve breakpoint data exactly");
  evolve->fallthrough();
  evolve->add_option("--input", da.input, "breakpoint CSV (s,f0,f1)");
  evolve->add_option("--t", da.t, "time");
  evolve->add_option("--output", da.output, "output CSV");

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "diagnostics on a snapshot directory");
  analyze->fallthrough();
  analyze->add_option("--input", aa.input, "run directory or snapshots directory");
  analyze->add_option("--t-est", aa.t_est, "blow-up time estimate for the singular split");
  analyze->add_flag("--linear", aa.linear, "linear-mode identities");

  ProfilesArgs pa;
  auto* profiles = app.add_subcommand("profiles", "scaling profile decomposition of a snapshot");
  profiles->fallthrough();
  profiles->add_option("--input", pa.input, "snapshot CSV (r,u,ut)");
  profiles->add_option("--max-profiles", pa.config.max_profiles);
  profiles->add_option("--floor", pa.config.correlation_floor);
  profiles->add_option("--separation", pa.config.separation_factor);

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "parameter sweep over a template config");
  sweep->fallthrough();
  sweep->add_option("--param", sa.param, "config key to vary");
  sweep->add_option("--values", sa.values, "values")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "critwave: " << e.what() << "\n";
    return kConfigError;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    if (simulate->parsed()) return cmd_simulate(g, out);
    if (check->parsed()) return cmd_dalembert_check(g, da, out);
    if (evolve->parsed()) return cmd_dalembert_evolve(g, da, out);
    if (analyze->parsed()) return cmd_analyze(g, aa, out);
    if (profiles->parsed()) return cmd_profiles(g, pa, out);
    if (sweep->parsed()) return cmd_sweep(g, sa, out, err);
  } catch (const Error& e) {
    err << "critwave: " << e.what() << "\n";
    return e.code() == Errc::invalid_config ? kConfigError : kRuntimeFailure;
  } catch (const std::exception& e) {
    err << "critwave: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kConfigError;
}

}  // namespace critwave::cli
