#include "critwave/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "critwave/analysis.hpp"
#include "critwave/error.hpp"

namespace critwave {

namespace {

using json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

double parse_number(const std::string& text, const std::string& what) {
  double x = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  auto [ptr, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || ptr != e) throw Error(Errc::invalid_config, what + ": not a number '" + text + "'");
  return x;
}

bool parse_bool(const std::string& text, const std::string& what) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw Error(Errc::invalid_config, what + ": expected true or false");
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::string body = trim(text);
  if (!body.empty() && body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
  std::vector<double> out;
  if (trim(body).empty()) return out;
  for (const auto& part : split(body, ',')) out.push_back(parse_number(part, what));
  return out;
}

std::string list_text(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += format_double(xs[i]);
  }
  return out;
}

// Flattens a JSON object into dotted keys with text values.
void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    const json& v = it.value();
    if (v.is_object()) {
      flatten(v, key, out);
    } else if (v.is_string()) {
      out.emplace_back(key, v.get<std::string>());
    } else if (v.is_boolean()) {
      out.emplace_back(key, v.get<bool>() ? "true" : "false");
    } else if (v.is_number_integer() || v.is_number_unsigned()) {
      out.emplace_back(key, v.dump());
    } else if (v.is_number()) {
      out.emplace_back(key, format_double(v.get<double>()));
    } else if (v.is_array()) {
      std::vector<double> xs;
      for (const auto& e : v) {
        if (!e.is_number()) throw Error(Errc::invalid_config, key + ": arrays must hold numbers");
        xs.push_back(e.get<double>());
      }
      out.emplace_back(key, "[" + list_text(xs) + "]");
    } else {
      throw Error(Errc::invalid_config, key + ": unsupported value");
    }
  }
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string csv_optional(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

}  // namespace

const char* version() noexcept { return CRITWAVE_VERSION; }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

std::string snapshot_csv(const FieldState& field) {
  std::string out = "r,u,ut\n";
  const auto r = field.mesh->nodes();
  for (std::size_t i = 0; i < field.size(); ++i) {
    out += format_double(r[i]);
    out += ',';
    out += format_double(field.u(i));
    out += ',';
    out += format_double(field.ut(i));
    out += '\n';
  }
  return out;
}

void write_snapshot_csv(const std::filesystem::path& path, const FieldState& field) {
  write_text(path, snapshot_csv(field));
}

FieldState read_snapshot_csv(const std::filesystem::path& path, double t) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || trim(line) != "r,u,ut") {
    throw Error(Errc::invalid_data, path.string() + ": expected header r,u,ut");
  }
  std::vector<double> r, u, ut;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 3) throw Error(Errc::invalid_data, path.string() + ": expected 3 columns");
    try {
      r.push_back(parse_number(cols[0], "r"));
      u.push_back(parse_number(cols[1], "u"));
      ut.push_back(parse_number(cols[2], "ut"));
    } catch (const Error& e) {
      throw Error(Errc::invalid_data, path.string() + ": " + e.what());
    }
  }
  auto mesh = std::make_shared<const RadialMesh>(RadialMesh::from_nodes(r));
  FieldState field = FieldState::zero(mesh, t);
  for (std::size_t i = 1; i < r.size(); ++i) {
    field.h[i] = r[i] * u[i];
    field.p[i] = r[i] * ut[i];
  }
  return field;
}

void write_breakpoint_csv(const std::filesystem::path& path, const PiecewiseData& data) {
  std::string out = "s,f0,f1\n";
  for (std::size_t i = 0; i < data.s.size(); ++i) {
    out += format_double(data.s[i]) + "," + format_double(data.f0[i]) + "," + format_double(data.f1[i]) + "\n";
  }
  write_text(path, out);
}

PiecewiseData read_breakpoint_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || trim(line) != "s,f0,f1") {
    throw Error(Errc::invalid_data, path.string() + ": expected header s,f0,f1");
  }
  PiecewiseData data;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 3) throw Error(Errc::invalid_data, path.string() + ": expected 3 columns");
    try {
      data.s.push_back(parse_number(cols[0], "s"));
      data.f0.push_back(parse_number(cols[1], "f0"));
      data.f1.push_back(parse_number(cols[2], "f1"));
    } catch (const Error& e) {
      throw Error(Errc::invalid_data, path.string() + ": " + e.what());
    }
  }
  if (!data.empty()) data.validate();
  return data;
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "mesh.h") c.h = parse_number(v, key);
  else if (key == "mesh.rmax") c.r_max = parse_number(v, key);
  else if (key == "cfl") c.cfl = parse_number(v, key);
  else if (key == "t_end") c.t_end = parse_number(v, key);
  else if (key == "nonlinear") c.nonlinear = parse_bool(v, key);
  else if (key == "blowup_threshold") c.blowup_threshold = parse_number(v, key);
  else if (key == "dt_min") c.dt_min = parse_number(v, key);
  else if (key == "output.every") c.output_every = parse_number(v, key);
  else if (key == "data.family") c.data.family = parse_family(v);
  else if (key == "data.delta") c.data.delta = parse_number(v, key);
  else if (key == "data.lambda") c.data.lambda = parse_number(v, key);
  else if (key == "data.amp") c.data.amp = parse_number(v, key);
  else if (key == "data.sigma") c.data.sigma = parse_number(v, key);
  else if (key == "data.r_cut") c.data.r_cut = parse_number(v, key);
  else if (key == "data.path") c.data.path = v;
  else if (key == "seed") {
    std::uint64_t s = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw Error(Errc::invalid_config, "seed: not an unsigned integer");
    c.seed = s;
  }
  else if (key == "diagnostics.ball_radii") c.diagnostics.ball_radii = parse_list(v, key);
  else if (key == "diagnostics.g_radii") c.diagnostics.g_radii = parse_list(v, key);
  else if (key == "diagnostics.rho_radii") c.diagnostics.rho_radii = parse_list(v, key);
  else throw Error(Errc::invalid_config, "unknown config key '" + key + "'");
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  const std::string body = trim(text);
  std::vector<std::pair<std::string, std::string>> pairs;
  if (!body.empty() && body.front() == '{') {
    json j;
    try {
      j = json::parse(body);
    } catch (const json::exception& e) {
      throw Error(Errc::invalid_config, std::string("config JSON: ") + e.what());
    }
    flatten(j, "", pairs);
  } else {
    std::istringstream in(body);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (trim(line).empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw Error(Errc::invalid_config, "config line " + std::to_string(lineno) + ": expected key = value");
      }
      pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }
  for (const auto& [k, v] : pairs) set_config_value(config, k, v);
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const Error& e) {
    throw Error(Errc::invalid_config, e.what());
  }
  return parse_config(text);
}

std::string canonical_config(const RunConfig& c) {
  std::map<std::string, std::string> kv{
      {"mesh.h", format_double(c.h)},
      {"mesh.rmax", format_double(c.r_max)},
      {"cfl", format_double(c.cfl)},
      {"t_end", format_double(c.t_end)},
      {"nonlinear", c.nonlinear ? "true" : "false"},
      {"blowup_threshold", format_double(c.blowup_threshold)},
      {"dt_min", format_double(c.dt_min)},
      {"output.every", format_double(c.output_every)},
      {"data.family", to_string(c.data.family)},
      {"data.delta", format_double(c.data.delta)},
      {"data.lambda", format_double(c.data.lambda)},
      {"data.amp", format_double(c.data.amp)},
      {"data.sigma", format_double(c.data.sigma)},
      {"data.r_cut", format_double(c.data.r_cut)},
      {"data.path", c.data.path},
      {"seed", std::to_string(c.seed)},
      {"diagnostics.ball_radii", list_text(c.diagnostics.ball_radii)},
      {"diagnostics.g_radii", list_text(c.diagnostics.g_radii)},
      {"diagnostics.rho_radii", list_text(c.diagnostics.rho_radii)},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[x & 0xf];
    x >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

std::string series_csv(const DiagnosticsSeries& series) {
  std::string out = "t,E,sup_u,mu,nu,lambda1,f,z1,z2,Z,d";
  for (double r : series.options.g_radii) out += ",g_" + format_double(r);
  out += '\n';
  for (const auto& row : series.rows) {
    out += format_double(row.t) + "," + format_double(row.energy) + "," + format_double(row.sup_u) + "," +
           csv_optional(row.mu) + "," + csv_optional(row.nu) + "," + csv_optional(row.lambda1) + "," +
           csv_optional(row.f) + "," + format_double(row.z1) + "," + format_double(row.z2) + "," +
           format_double(row.Z) + "," + format_double(row.d);
    for (double g : row.g) out += "," + format_double(g);
    out += '\n';
  }
  return out;
}

std::string tails_csv(const DiagnosticsSeries& series) {
  std::string out = "t";
  for (double r : series.options.ball_radii) out += ",ball_" + format_double(r);
  for (double r : series.options.rho_radii) out += ",rho_" + format_double(r);
  out += '\n';
  for (const auto& row : series.rows) {
    out += format_double(row.t);
    for (double b : row.ball) out += "," + format_double(b);
    for (double x : row.rho) out += "," + format_double(x);
    out += '\n';
  }
  return out;
}

std::string report_json(const RunReport& report, const RunConfig& config) {
  json j;
  j["outcome"] = to_string(report.outcome);
  j["t_star"] = finite_or_null(report.t_star);
  j["t_final"] = report.t_final;
  j["contamination_time"] = finite_or_null(report.contamination_time);
  j["steps"] = report.steps;
  j["frames"] = report.snapshots.size();
  j["initial_energy"] = report.initial_energy;
  j["energy_drift"] = report.energy_drift;
  double peak = 0.0;
  for (const auto& [t, a] : report.amplitude_history) peak = std::max(peak, a);
  j["max_amplitude"] = peak;
  const StrichartzResult s = strichartz_monitor(report);
  j["strichartz_l8"] = s.value;
  j["strichartz_degraded"] = s.degraded;
  json fit = nullptr;
  if (report.outcome == Outcome::blowup_detected) {
    const double t_est = report.t_star - 0.5 * config.output_every;
    j["t_est"] = t_est;
    std::vector<double> ts, ls;
    for (const auto& row : report.series.rows) {
      if (row.lambda1) {
        ts.push_back(row.t);
        ls.push_back(*row.lambda1);
      }
    }
    try {
      const FitResult f = fit_exponent(ts, ls, t_est);
      fit = json{{"nu_hat", f.nu_hat}, {"slope", f.slope}, {"r_squared", f.r_squared},
                 {"points", f.points}, {"concentrating", f.concentrating}};
    } catch (const Error&) {
      fit = nullptr;
    }
    const auto cone = cone_energy(report.snapshots, t_est);
    double cone_max = 0.0;
    // The late-time value: max over the last quarter of frames before T_est.
    const std::size_t start = cone.size() - cone.size() / 4 - 1;
    for (std::size_t k = start; k < cone.size(); ++k) cone_max = std::max(cone_max, cone[k]);
    j["late_cone_energy"] = cone_max;
  }
  j["fit"] = fit;
  j["config_hash"] = hex64(config_hash(config));
  j["seed"] = config.seed;
  return j.dump(2) + "\n";
}

std::string decomposition_json(const ProfileDecomposition& d, const PythagoreanDefects& defects) {
  json j;
  json profiles = json::array();
  for (const auto& p : d.profiles) {
    profiles.push_back(json{{"iota", p.iota}, {"lambda", p.lambda}, {"raw_coefficient", p.raw_coefficient}});
  }
  j["profiles"] = profiles;
  j["total_grad_sq"] = d.total_grad_sq;
  j["residual_grad_sq"] = d.residual_grad_sq;
  j["residual_kin_sq"] = d.residual_kin_sq;
  j["pythagorean_defect"] = d.pythagorean_defect;
  j["defects"] = json{{"grad", defects.grad_defect},
                      {"kinetic", defects.kinetic_defect},
                      {"energy", defects.energy_defect},
                      {"cross_term_bound", defects.cross_term_bound}};
  j["correlation_history"] = d.correlation_history;
  j["over_budget"] = d.over_budget;
  j["orthogonality"] = orthogonality_matrix(d);
  return j.dump(2) + "\n";
}

std::string manifest_json(const ExperimentManifest& m) {
  json j;
  j["config_hash"] = hex64(m.config_hash);
  j["tool_version"] = m.tool_version;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["outcome"] = m.outcome;
  json files = json::array();
  for (const auto& f : m.files) files.push_back(json{{"path", f.path}, {"rows", f.rows}});
  j["files"] = files;
  return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(Errc::io_error, "write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  return lines > 0 ? lines - 1 : 0;
}

}  // namespace critwave
