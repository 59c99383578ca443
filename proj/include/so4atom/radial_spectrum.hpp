// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

// Sector-by-sector radial eigensolver for the spin-dependent Hamiltonian and
// the closed-form spectrum it is compared against.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "so4atom/paper_catalog.hpp"

namespace so4atom {

struct CouplingParams {
  double hbar = 1;
  double mass = 1;
  double k1 = -1;
  double k2 = 0;
  int mu = 1;  // 0 or 1
};

/// Effective Coulomb strength k1 + mu k2 s_r hbar.
double effective_coupling(const CouplingParams& p, double s_r);

/// Uniform grid r_i = r_min + i h, i = 0..n-1, with u = 0 one step beyond
/// both ends.
struct Grid {
  double r_min = 0;  // 0 selects r_max / n
  double r_max = 200;
  int n = 4000;

  double first() const { return r_min > 0 ? r_min : r_max / n; }
  double step() const { return (r_max - first()) / (n - 1); }
  double at(int i) const { return first() + i * step(); }
};

/// Fixed total angular momentum j (stored as 2j). At mu = 1 the sector holds
/// the channels l = j - 1/2 and l = j + 1/2; at mu = 0 j is the integer l.
struct RadialSector {
  int two_j = 1;
  Grid grid;
  int mu = 1;

  std::string label() const;
};

/// Lower band storage in LAPACK column-major layout: entry (i, j), i >= j,
/// lives at ab[(i - j) + j (kd + 1)].
struct BandedMatrix {
  int n = 0;
  int kd = 0;
  std::vector<double> ab;

  BandedMatrix(int n, int kd);
  double& at(int i, int j);
  /// Symmetric access; zero outside the band.
  double get(int i, int j) const;
};

/// Engine check of the reduced Hamiltonian the sector matrix is built from:
/// the spin Hamiltonian equals p^2/2M + k1/r + mu k2 (r.S)/r^2
/// + s mu (S.l)/(M r^2) + mu^2 S^2/(2 M r^2) + (mu - mu^2)(r.S)^2/(2 M r^4),
/// with s = `spin_orbit_scale` (1 for the true form).
CheckResult reduced_form_check(SpinMode mode = SpinMode::SpinHalf, MuPolicy mu = MuPolicy::One,
                               const Rational& spin_orbit_scale = 1);

/// Finite-difference matrix of the reduced form in the sector. Channels are
/// interleaved (index 2i + c) at mu = 1, giving bandwidth 2.
///
/// Spin-angular matrix elements on spinor spherical harmonics:
///   S.l = hbar^2 l/2 at l = j - 1/2 and -hbar^2 (l + 1)/2 at l = j + 1/2,
///   S^2 = 3 hbar^2/4, (r.S)^2/r^2 = hbar^2/4,
///   (sigma.r_hat) maps the l = j - 1/2 harmonic to minus the l = j + 1/2 one,
///   so (r.S)/r^2 couples the channels with -hbar/(2 r).
BandedMatrix build_sector_matrix(const RadialSector& sector, const CouplingParams& params);

/// One radial channel with V(r) = c/r + centrifugal/r^2.
BandedMatrix build_channel_matrix(const Grid& grid, const CouplingParams& params, double coulomb,
                                  double centrifugal);

/// Lowest `count` levels of the sector solved in the S_r basis: both channels
/// carry the centrifugal term hbar^2 j(j+1)/(2M) there, so the sector splits
/// into two single-channel problems with Coulomb strength k1 + k2 s_r hbar.
/// mu = 1 only; ascending, merged over s_r = +-1/2.
std::vector<double> sr_basis_levels(const RadialSector& sector, const CouplingParams& params, int count);

/// The `count` smallest eigenvalues in ascending order.
std::vector<double> solve_lowest(const BandedMatrix& m, int count);

struct Eigenpairs {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // orthonormal, one per value
};

/// The `count` smallest eigenpairs.
Eigenpairs solve_lowest_pairs(const BandedMatrix& m, int count);

struct PredictedLevel {
  double energy;
  int n;
  char branch;  // '+' or '-' of (n +- mu s_r); ' ' at mu = 0
  double s_r;
};

/// Closed form E = -(M/2 hbar^2)(k1 + mu k2 s_r hbar)^2 / (n +- mu s_r)^2,
/// n = 1..n_max, both branches. Empty when the effective coupling vanishes;
/// at mu = 0 a single branch with s_r = 0.
std::vector<PredictedLevel> predicted_levels(const CouplingParams& params, double s_r, int n_max);

struct ComputedLevel {
  double energy;
  /// "s_r=+1/2", "s_r=-1/2", "l=<l>" or "mixed".
  std::string tag;
  std::optional<double> s_r;
  /// Below the reliability cutoff.
  bool reliable;
};

struct LevelMatch {
  std::size_t computed;
  std::size_t predicted;
  double rel_error;
  bool within_tol;
};

struct SpectrumResult {
  std::string sector;
  CouplingParams params;
  double e_cut = 0;
  std::vector<ComputedLevel> computed;
  std::vector<PredictedLevel> predicted;
  std::vector<LevelMatch> matches;
  std::vector<std::size_t> unmatched_computed;
  /// Predicted levels below the cutoff that no computed level claimed.
  std::vector<std::size_t> unmatched_predicted;
  double tol_rel = 1e-3;
  bool require_all_predicted = true;
  bool pass = false;
  /// Set when a sector has no bound state to compare.
  std::string note;
};

/// E_cut = -5 max|c_eff| / r_max: a level above it extends past r_max/5.
double reliability_cutoff(const CouplingParams& params, const Grid& grid);

/// Greedy nearest pairing in ascending order over the reliable computed
/// levels. Tagged levels only pair with predicted levels of the same s_r.
/// Passes when every pair is within tol_rel, no reliable computed level is
/// left over, and (if required) no predicted level below E_cut is unclaimed.
SpectrumResult match_spectrum(std::vector<ComputedLevel> computed, std::vector<PredictedLevel> predicted,
                              double tol_rel, double e_cut, bool require_all_predicted);

/// Builds, solves and matches one sector. Runs reduced_form_check first at
/// mu = 1 and throws Error if it fails.
SpectrumResult study_sector(const RadialSector& sector, const CouplingParams& params, int levels,
                            double tol_rel = 1e-3);

struct WkSolution {
  bool admissible = false;
  double energy = 0;
  double t = 0;
  int n = 0;
  /// Branch of the closed form the energy equals, if any.
  std::optional<char> branch;
  std::string reason;
};

/// Solves the W/K Casimir pair for E with t = sqrt(M/(-2E)). Half-integers
/// are passed doubled (two_w = 2w, two_k = 2k).
WkSolution solve_wk_pair(int two_w, int two_k, double s_r, const CouplingParams& params);

/// CSV rows: sector_j, s_r_or_channel, level_index, E_computed, E_predicted,
/// n_label, branch, rel_error.
std::string spectrum_csv(const std::vector<SpectrumResult>& results);

std::string half_integer_str(int twice);

}  // namespace so4atom
