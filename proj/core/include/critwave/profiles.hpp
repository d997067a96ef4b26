#pragma once

#include <vector>

#include "critwave/mesh.hpp"

namespace critwave {

struct ExtractConfig {
  std::size_t max_profiles = 8;
  double correlation_floor = 0.3;
  double separation_factor = 10.0;
  /// Coefficients outside [snap_low, snap_high] in magnitude are not snapped to +-1.
  double snap_low = 0.7;
  double snap_high = 1.3;
  int seeds_per_decade = 8;
  int refine_sweeps = 3;
  /// Search range for lambda; 0 selects [4 min spacing, r_max / 4].
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

struct Profile {
  int iota = 1;
  double lambda = 1.0;
  double raw_coefficient = 1.0;  ///< correlation at the accepted scale before snapping
};

struct ProfileDecomposition {
  std::vector<Profile> profiles;  ///< sorted by decreasing lambda
  double total_grad_sq = 0.0;
  double residual_grad_sq = 0.0;
  double residual_kin_sq = 0.0;
  double pythagorean_defect = 0.0;
  std::vector<double> correlation_history;
  bool over_budget = false;
  FieldState residual;
};

/// <grad a, grad W_lambda> / ||grad W||^2
double correlate_scale(const FieldState& a, double lambda);

/// W_lambda (times iota) sampled on the mesh of `like`, with zero velocity.
FieldState sample_w(const MeshPtr& mesh, double lambda, int iota = 1);

ProfileDecomposition extract(const FieldState& a, const ExtractConfig& config = {});

struct PythagoreanDefects {
  double grad_defect = 0.0;
  double kinetic_defect = 0.0;
  double energy_defect = 0.0;
  /// 2 sum_{j<k} |<grad W_j, grad W_k>| + 2 sum_j |<grad W_j, grad residual>|
  double cross_term_bound = 0.0;
};

PythagoreanDefects pythagorean_check(const FieldState& a, const ProfileDecomposition& decomposition);

/// <grad W_1, grad W_s> / ||grad W||^2 by quadrature; symmetric in s <-> 1/s.
double scale_pairing(double s);

/// Normalized cross pairings of the extracted scales; empty with < 2 profiles.
std::vector<std::vector<double>> orthogonality_matrix(const ProfileDecomposition& decomposition);

}  // namespace critwave
