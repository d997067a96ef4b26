#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "critwave/analysis_types.hpp"
#include "critwave/dalembert.hpp"
#include "critwave/mesh.hpp"
#include "critwave/profiles.hpp"
#include "critwave/solver.hpp"

namespace critwave {

const char* version() noexcept;

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

/// Snapshot CSV with header "r,u,ut".
void write_snapshot_csv(const std::filesystem::path& path, const FieldState& field);
std::string snapshot_csv(const FieldState& field);
/// Reads a snapshot; the radii become the mesh (first radius must be 0).
FieldState read_snapshot_csv(const std::filesystem::path& path, double t = 0.0);

/// Breakpoint CSV with header "s,f0,f1".
void write_breakpoint_csv(const std::filesystem::path& path, const PiecewiseData& data);
PiecewiseData read_breakpoint_csv(const std::filesystem::path& path);

/// Run configuration from "key = value" lines or a JSON object (nested
/// objects flatten to dotted keys). Unknown keys raise invalid-config.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
/// Applies one key/value pair (value in text form).
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// Canonical "key = value" listing of every configuration field.
std::string canonical_config(const RunConfig& config);
/// FNV-1a 64 of canonical_config.
std::uint64_t config_hash(const RunConfig& config);
std::string hex64(std::uint64_t x);

/// header "t,E,sup_u,mu,nu,lambda1,f,z1,z2,Z,d" then one "g_<R>" column per g radius
std::string series_csv(const DiagnosticsSeries& series);
/// header "t" then "ball_<R>" and "rho_<R>" columns
std::string tails_csv(const DiagnosticsSeries& series);

std::string report_json(const RunReport& report, const RunConfig& config);

std::string decomposition_json(const ProfileDecomposition& decomposition, const PythagoreanDefects& defects);

struct ManifestFile {
  std::string path;
  std::size_t rows = 0;
};

struct ExperimentManifest {
  std::uint64_t config_hash = 0;
  std::string tool_version;
  std::string started;
  std::string finished;
  std::string outcome;
  std::vector<ManifestFile> files;
};

std::string manifest_json(const ExperimentManifest& manifest);

/// Writes text, creating parent directories; throws io-error on failure.
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);
/// Data rows in a CSV file (lines after the header).
std::size_t count_rows(const std::filesystem::path& path);

}  // namespace critwave
