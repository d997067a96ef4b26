#pragma once

#include <optional>
#include <vector>

namespace critwave {

/// Radii lists controlling the per-frame diagnostics.
struct DiagnosticsOptions {
  std::vector<double> ball_radii{1.0};
  std::vector<double> g_radii{4.0};
  std::vector<double> rho_radii{4.0};
};

/// One output frame of the measured quantities.
struct DiagnosticsRow {
  double t = 0.0;
  double energy = 0.0;
  double sup_u = 0.0;
  std::optional<double> mu;
  std::optional<double> nu;
  std::optional<double> lambda1;
  std::optional<double> f;
  double z1 = 0.0;
  double z2 = 0.0;
  double Z = 0.0;
  double d = 0.0;
  std::vector<double> g;     ///< g_R per DiagnosticsOptions::g_radii
  std::vector<double> ball;  ///< ball energies per ball_radii
  std::vector<double> rho;   ///< running sup of the weighted tail per rho_radii
};

struct DiagnosticsSeries {
  DiagnosticsOptions options;
  std::vector<DiagnosticsRow> rows;
};

}  // namespace critwave
