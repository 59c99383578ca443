// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

#include "so4atom/radial_spectrum.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace so4atom {

std::string half_integer_str(int twice) {
  if (twice % 2 == 0) return std::to_string(twice / 2);
  return std::to_string(twice) + "/2";
}

double effective_coupling(const CouplingParams& p, double s_r) { return p.k1 + p.mu * p.k2 * s_r * p.hbar; }

std::string RadialSector::label() const {
  return mu == 0 ? "l=" + half_integer_str(two_j) : "j=" + half_integer_str(two_j);
}

BandedMatrix::BandedMatrix(int n_, int kd_) : n(n_), kd(kd_), ab(static_cast<std::size_t>(n_) * (kd_ + 1), 0.0) {}

double& BandedMatrix::at(int i, int j) {
  if (i < j) std::swap(i, j);
  if (i - j > kd || i >= n || j < 0) throw UsageError("band index out of range");
  return ab[static_cast<std::size_t>(i - j) + static_cast<std::size_t>(j) * (kd + 1)];
}

double BandedMatrix::get(int i, int j) const {
  if (i < j) std::swap(i, j);
  if (i - j > kd || i >= n || j < 0) return 0;
  return ab[static_cast<std::size_t>(i - j) + static_cast<std::size_t>(j) * (kd + 1)];
}

CheckResult reduced_form_check(SpinMode mode, MuPolicy mu, const Rational& spin_orbit_scale) {
  SuiteRunner runner(load_suite("theorem"));
  CheckSpec spec;
  spec.id = "reduced_form";
  spec.mode = mode;
  spec.mu = mu;
  spec.lhs = make_sym("Hs");
  spec.rhs = parse("(1/(2*M))*p^2 + k1*r^-1 + mu*k2*dot(r, S)*r^-2 + (" + rational_str(spin_orbit_scale) +
                   ")*(mu/M)*dot(S, l)*r^-2 + (mu^2/(2*M))*dot(S, S)*r^-2 + ((mu - mu^2)/(2*M))*dot(r, S)^2*r^-4");
  return runner.run(spec);
}

namespace {

void check_grid(const Grid& g) {
  if (g.n < 500) throw UsageError("grid too coarse: N = " + std::to_string(g.n) + " < 500");
  if (!(g.r_max > g.first()) || g.first() <= 0) throw UsageError("grid needs 0 < r_min < r_max");
}

}  // namespace

BandedMatrix build_channel_matrix(const Grid& grid, const CouplingParams& params, double coulomb,
                                  double centrifugal) {
  check_grid(grid);
  const double h = grid.step();
  const double kinetic = params.hbar * params.hbar / (2 * params.mass * h * h);
  BandedMatrix m(grid.n, 1);
  for (int i = 0; i < grid.n; ++i) {
    double r = grid.at(i);
    m.at(i, i) = 2 * kinetic + centrifugal / (r * r) + coulomb / r;
    if (i + 1 < grid.n) m.at(i + 1, i) = -kinetic;
  }
  return m;
}

BandedMatrix build_sector_matrix(const RadialSector& sector, const CouplingParams& params) {
  const Grid& grid = sector.grid;
  check_grid(grid);
  if (sector.mu != params.mu) throw UsageError("sector and coupling parameters disagree on mu");
  const double hb2 = params.hbar * params.hbar;
  const double two_m = 2 * params.mass;
  if (params.mu == 0) {
    if (sector.two_j < 0 || sector.two_j % 2 != 0) throw UsageError("at mu = 0 the sector label is an integer l");
    double l = sector.two_j / 2;
    return build_channel_matrix(grid, params, params.k1, hb2 * l * (l + 1) / two_m);
  }
  if (params.mu != 1) throw UsageError("mu must be 0 or 1");
  if (sector.two_j < 1 || sector.two_j % 2 != 1) throw UsageError("at mu = 1 j must be a positive half-integer");
  const double mu = params.mu;
  const double j = sector.two_j / 2.0;
  const double ls[2] = {j - 0.5, j + 0.5};
  const double spin_orbit[2] = {hb2 * ls[0] / 2, -hb2 * (ls[1] + 1) / 2};
  double centrifugal[2];
  for (int c = 0; c < 2; ++c)
    centrifugal[c] = hb2 * ls[c] * (ls[c] + 1) / two_m + mu * spin_orbit[c] / params.mass +
                     mu * mu * 3 * hb2 / (4 * two_m) + (mu - mu * mu) * hb2 / (4 * two_m);
  const double h = grid.step();
  const double kinetic = hb2 / (two_m * h * h);
  BandedMatrix m(2 * grid.n, 2);
  for (int i = 0; i < grid.n; ++i) {
    double r = grid.at(i);
    for (int c = 0; c < 2; ++c) {
      int k = 2 * i + c;
      m.at(k, k) = 2 * kinetic + centrifugal[c] / (r * r) + params.k1 / r;
      if (i + 1 < grid.n) m.at(k + 2, k) = -kinetic;
    }
    m.at(2 * i + 1, 2 * i) = -mu * params.k2 * params.hbar / (2 * r);
  }
  return m;
}

std::vector<double> sr_basis_levels(const RadialSector& sector, const CouplingParams& params, int count) {
  if (params.mu != 1 || sector.mu != 1) throw UsageError("the S_r basis applies at mu = 1");
  if (sector.two_j < 1 || sector.two_j % 2 != 1) throw UsageError("at mu = 1 j must be a positive half-integer");
  const double j = sector.two_j / 2.0;
  const double centrifugal = params.hbar * params.hbar * j * (j + 1) / (2 * params.mass);
  std::vector<double> all;
  for (double s : {0.5, -0.5}) {
    auto e = solve_lowest(build_channel_matrix(sector.grid, params, effective_coupling(params, s), centrifugal), count);
    all.insert(all.end(), e.begin(), e.end());
  }
  std::sort(all.begin(), all.end());
  all.resize(count);
  return all;
}

namespace {

std::vector<double> lowest_values(const BandedMatrix& m, int count) {
  if (count < 1 || count > m.n)
    throw UsageError("requested " + std::to_string(count) + " eigenvalues of a " + std::to_string(m.n) +
                     "-dimensional matrix");
  std::vector<double> ab = m.ab;
  std::vector<double> w(m.n);
  std::vector<lapack_int> ifail(m.n);
  double q = 0;
  double z = 0;
  lapack_int found = 0;
  const double abstol = 2 * LAPACKE_dlamch('S');
  lapack_int info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'I', 'L', m.n, m.kd, ab.data(), m.kd + 1, &q, 1, 0, 0, 1,
                                   count, abstol, &found, w.data(), &z, 1, ifail.data());
  if (info < 0) throw Error("dsbevx: illegal argument " + std::to_string(-info));
  if (info > 0) {
    std::string failed;
    for (lapack_int k = 0; k < info && k < static_cast<lapack_int>(ifail.size()); ++k)
      failed += (k ? ", " : "") + std::to_string(ifail[k]);
    throw Error("dsbevx: " + std::to_string(info) + " eigenvalue(s) failed to converge (indices " + failed + ")");
  }
  w.resize(found);
  return w;
}

// Modified Gram-Schmidt of v against the already orthonormal block.
void orthonormalize(std::vector<double>& v, const std::vector<std::vector<double>>& block) {
  for (const auto& b : block) {
    double d = 0;
    for (std::size_t i = 0; i < v.size(); ++i) d += v[i] * b[i];
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= d * b[i];
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
}

// Block inverse iteration for one cluster of (near-)equal eigenvalues: a
// single LU factorization at a shift just below the cluster, with the block
// re-orthonormalized after every solve.
std::vector<std::vector<double>> cluster_vectors(const BandedMatrix& m, double eigenvalue, int size) {
  const int kl = m.kd;
  const int ldab = 3 * kl + 1;
  const double shift = eigenvalue - 1e-10 * std::max(1.0, std::abs(eigenvalue));
  std::vector<double> ab(static_cast<std::size_t>(ldab) * m.n, 0.0);
  for (int j = 0; j < m.n; ++j)
    for (int i = std::max(0, j - kl); i <= std::min(m.n - 1, j + kl); ++i)
      ab[static_cast<std::size_t>(2 * kl + i - j) + static_cast<std::size_t>(j) * ldab] =
          m.get(i, j) - (i == j ? shift : 0);
  std::vector<lapack_int> ipiv(m.n);
  lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, m.n, m.n, kl, kl, ab.data(), ldab, ipiv.data());
  if (info < 0) throw Error("dgbtrf: illegal argument " + std::to_string(-info));
  std::vector<std::vector<double>> block(size, std::vector<double>(m.n));
  for (int k = 0; k < size; ++k)
    for (int i = 0; i < m.n; ++i) block[k][i] = 1 + 0.25 * std::sin(0.7 * (k + 1) * i + k);
  for (int iter = 0; iter < 3; ++iter) {
    std::vector<std::vector<double>> done;
    for (auto& x : block) {
      info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', m.n, kl, kl, 1, ab.data(), ldab, ipiv.data(), x.data(), m.n);
      if (info != 0) throw Error("dgbtrs failed with info " + std::to_string(info));
      orthonormalize(x, done);
      done.push_back(x);
    }
  }
  return block;
}

bool same_level(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

// <u|sigma_r|v> on the interleaved two-channel grid: sigma_r swaps the
// channels with a minus sign.
double sigma_r_element(const std::vector<double>& u, const std::vector<double>& v) {
  double s = 0;
  for (std::size_t i = 0; i + 1 < u.size(); i += 2) s -= u[i] * v[i + 1] + u[i + 1] * v[i];
  return s;
}

// S_r commutes with the sector Hamiltonian, so within each degenerate cluster
// the eigenvectors can be rotated to diagonalize it.
void diagonalize_sigma_r(Eigenpairs& e) {
  const std::size_t count = e.values.size();
  for (std::size_t lo = 0; lo < count;) {
    std::size_t hi = lo + 1;
    while (hi < count && same_level(e.values[hi], e.values[lo])) ++hi;
    const int k = static_cast<int>(hi - lo);
    if (k > 1) {
      std::vector<double> a(static_cast<std::size_t>(k) * k);
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) a[r + c * k] = sigma_r_element(e.vectors[lo + r], e.vectors[lo + c]);
      std::vector<double> w(k);
      lapack_int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'V', 'U', k, a.data(), k, w.data());
      if (info != 0) throw Error("dsyev failed with info " + std::to_string(info));
      std::vector<std::vector<double>> rotated(k, std::vector<double>(e.vectors[lo].size(), 0.0));
      for (int c = 0; c < k; ++c)
        for (int r = 0; r < k; ++r)
          for (std::size_t i = 0; i < rotated[c].size(); ++i) rotated[c][i] += a[r + c * k] * e.vectors[lo + r][i];
      for (int c = 0; c < k; ++c) e.vectors[lo + c] = std::move(rotated[c]);
    }
    lo = hi;
  }
}

}  // namespace

std::vector<double> solve_lowest(const BandedMatrix& m, int count) { return lowest_values(m, count); }

Eigenpairs solve_lowest_pairs(const BandedMatrix& m, int count) {
  Eigenpairs out{lowest_values(m, count), {}};
  for (std::size_t lo = 0; lo < out.values.size();) {
    std::size_t hi = lo + 1;
    while (hi < out.values.size() && same_level(out.values[hi], out.values[lo])) ++hi;
    for (auto& v : cluster_vectors(m, out.values[lo], static_cast<int>(hi - lo))) out.vectors.push_back(std::move(v));
    lo = hi;
  }
  return out;
}

std::vector<PredictedLevel> predicted_levels(const CouplingParams& params, double s_r, int n_max) {
  std::vector<PredictedLevel> out;
  const double c = effective_coupling(params, s_r);
  if (c == 0) return out;
  const double pref = -params.mass * c * c / (2 * params.hbar * params.hbar);
  for (int n = 1; n <= n_max; ++n) {
    if (params.mu == 0) {
      out.push_back({pref / (double(n) * n), n, ' ', 0});
      continue;
    }
    for (char branch : {'+', '-'}) {
      double d = branch == '+' ? n + params.mu * s_r : n - params.mu * s_r;
      if (d != 0) out.push_back({pref / (d * d), n, branch, s_r});
    }
  }
  return out;
}

double reliability_cutoff(const CouplingParams& params, const Grid& grid) {
  double c = params.mu == 0
                 ? std::abs(params.k1)
                 : std::max(std::abs(effective_coupling(params, 0.5)), std::abs(effective_coupling(params, -0.5)));
  return -5 * c / grid.r_max;
}

SpectrumResult match_spectrum(std::vector<ComputedLevel> computed, std::vector<PredictedLevel> predicted,
                              double tol_rel, double e_cut, bool require_all_predicted) {
  SpectrumResult res;
  res.tol_rel = tol_rel;
  res.e_cut = e_cut;
  res.require_all_predicted = require_all_predicted;
  std::stable_sort(computed.begin(), computed.end(),
                   [](const ComputedLevel& a, const ComputedLevel& b) { return a.energy < b.energy; });
  std::stable_sort(predicted.begin(), predicted.end(),
                   [](const PredictedLevel& a, const PredictedLevel& b) { return a.energy < b.energy; });
  std::vector<bool> used(predicted.size(), false);
  double highest = -HUGE_VAL;
  for (std::size_t i = 0; i < computed.size(); ++i) {
    const ComputedLevel& c = computed[i];
    if (!c.reliable) continue;
    highest = std::max(highest, c.energy);
    std::size_t best = predicted.size();
    for (std::size_t k = 0; k < predicted.size(); ++k) {
      if (used[k]) continue;
      if (c.s_r && predicted[k].s_r != *c.s_r) continue;
      if (best == predicted.size() ||
          std::abs(predicted[k].energy - c.energy) < std::abs(predicted[best].energy - c.energy))
        best = k;
    }
    if (best == predicted.size()) {
      res.unmatched_computed.push_back(i);
      continue;
    }
    used[best] = true;
    double rel = std::abs(c.energy - predicted[best].energy) / std::abs(predicted[best].energy);
    res.matches.push_back({i, best, rel, rel <= tol_rel});
  }
  // Unclaimed predicted levels inside the computed window.
  for (std::size_t k = 0; k < predicted.size(); ++k)
    if (!used[k] && predicted[k].energy < e_cut && predicted[k].energy <= highest * (1 - tol_rel))
      res.unmatched_predicted.push_back(k);
  bool any_reliable_prediction =
      std::any_of(predicted.begin(), predicted.end(), [&](const PredictedLevel& p) { return p.energy < e_cut; });
  bool pairs_ok = std::all_of(res.matches.begin(), res.matches.end(), [](const LevelMatch& m) { return m.within_tol; });
  if (res.matches.empty() && res.unmatched_computed.empty()) {
    res.note = "no bound state below the reliability cutoff";
    res.pass = !any_reliable_prediction;
  } else {
    res.pass = pairs_ok && res.unmatched_computed.empty() && (!require_all_predicted || res.unmatched_predicted.empty());
  }
  res.computed = std::move(computed);
  res.predicted = std::move(predicted);
  return res;
}

SpectrumResult study_sector(const RadialSector& sector, const CouplingParams& params, int levels, double tol_rel) {
  if (params.mu == 1) {
    CheckResult check = reduced_form_check();
    if (check.status != CheckStatus::Pass)
      throw Error("reduced Hamiltonian check failed; spectrum run aborted: " + check.witness);
  }
  BandedMatrix m = build_sector_matrix(sector, params);
  Eigenpairs pairs = params.mu == 1 ? solve_lowest_pairs(m, std::min(levels, m.n))
                                     : Eigenpairs{solve_lowest(m, std::min(levels, m.n)), {}};
  if (params.mu == 1) diagonalize_sigma_r(pairs);
  const std::vector<double>& energies = pairs.values;
  const double e_cut = reliability_cutoff(params, sector.grid);

  std::vector<ComputedLevel> computed;
  const double j = sector.two_j / 2.0;
  for (std::size_t k = 0; k < energies.size(); ++k) {
    const double e = energies[k];
    if (e >= 0) continue;
    ComputedLevel lvl{e, "l=" + half_integer_str(sector.two_j), std::nullopt, e < e_cut};
    if (params.mu == 1) {
      const std::vector<double>& u = pairs.vectors[k];
      double w1 = 0;
      double sigma_r = 0;
      for (int i = 0; i < sector.grid.n; ++i) {
        w1 += u[2 * i] * u[2 * i];
        sigma_r -= 2 * u[2 * i] * u[2 * i + 1];
      }
      if (sigma_r > 0.99) {
        lvl.tag = "s_r=+1/2";
        lvl.s_r = 0.5;
      } else if (sigma_r < -0.99) {
        lvl.tag = "s_r=-1/2";
        lvl.s_r = -0.5;
      } else if (w1 > 0.99) {
        lvl.tag = "l=" + half_integer_str(static_cast<int>(2 * (j - 0.5)));
      } else if (w1 < 0.01) {
        lvl.tag = "l=" + half_integer_str(static_cast<int>(2 * (j + 0.5)));
      } else {
        lvl.tag = "mixed";
      }
    }
    computed.push_back(lvl);
  }

  // Only attractive effective couplings carry bound states.
  std::vector<PredictedLevel> predicted;
  double c_max = -e_cut * sector.grid.r_max / 5;
  int n_max = e_cut < 0 ? static_cast<int>(std::ceil(std::sqrt(params.mass * c_max * c_max /
                                                                (2 * params.hbar * params.hbar * -e_cut)))) + 2
                        : 0;
  for (double s : params.mu == 0 ? std::vector<double>{0} : std::vector<double>{0.5, -0.5}) {
    if (effective_coupling(params, s) >= 0) continue;
    auto p = predicted_levels(params, s, n_max);
    predicted.insert(predicted.end(), p.begin(), p.end());
  }
  // At mu = 1 the closed form lists more instances than one sector holds, so
  // only the computed side must be fully explained.
  SpectrumResult res = match_spectrum(std::move(computed), std::move(predicted), tol_rel, e_cut, params.mu == 0);
  res.sector = sector.label();
  res.params = params;
  if (energies.empty() || energies.front() >= 0) {
    res.note = "no bound states in this sector";
  } else {
    for (double s : params.mu == 0 ? std::vector<double>{0} : std::vector<double>{0.5, -0.5})
      if (effective_coupling(params, s) >= 0)
        res.note += (res.note.empty() ? "" : "; ") + std::string("effective coupling non-negative at s_r=") +
                    (s > 0 ? "+1/2" : s < 0 ? "-1/2" : "0") + ": no bound states there";
  }
  return res;
}

WkSolution solve_wk_pair(int two_w, int two_k, double s_r, const CouplingParams& params) {
  WkSolution out;
  if (two_w < 0 || two_k < 0) throw UsageError("w and k must be non-negative half-integers");
  if (params.mu == 1 && std::abs(std::abs(s_r) - 0.5) > 1e-15) throw UsageError("s_r must be +1/2 or -1/2");
  out.n = two_w + 1;
  const double hb = params.hbar;
  const double c = effective_coupling(params, s_r);
  if (c == 0) {
    out.reason = "k1 + mu k2 s_r hbar = 0: no energy solves the pair";
    return out;
  }
  const double w = two_w / 2.0;
  const double k = two_k / 2.0;
  const double a = w * (w + 1);
  const double b = k * (k + 1);
  // First equation: c^2 t^2 = 2 hbar^2 (A + B) - mu s_r^2 hbar^2 + hbar^2.
  const double t_sq = (2 * hb * hb * (a + b) - params.mu * s_r * s_r * hb * hb + hb * hb) / (c * c);
  if (t_sq <= 0) {
    out.reason = "first equation has no positive root";
    return out;
  }
  double t = 0;
  if (params.mu == 0) {
    if (two_w != two_k) {
      out.reason = "at mu = 0 the second equation forces w = k";
      return out;
    }
    t = std::sqrt(t_sq);
  } else {
    // Second equation: hbar^2 (A - B) = mu t c s_r hbar.
    t = hb * (a - b) / (params.mu * c * s_r);
    if (t <= 0) {
      out.reason = "second equation gives no positive t";
      return out;
    }
    if (std::abs(t * t - t_sq) > 1e-10 * t_sq) {
      out.reason = "the two equations disagree on t";
      return out;
    }
  }
  out.admissible = true;
  out.t = t;
  out.energy = -params.mass / (2 * t * t);
  for (const auto& p : predicted_levels(params, s_r, out.n))
    if (p.n == out.n && std::abs(p.energy - out.energy) <= 1e-12 * std::abs(p.energy)) out.branch = p.branch;
  if (!out.branch) out.reason = "admissible but matches neither branch of the closed form";
  return out;
}

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

std::string spectrum_csv(const std::vector<SpectrumResult>& results) {
  std::ostringstream os;
  os << "sector_j,s_r_or_channel,level_index,E_computed,E_predicted,n_label,branch,rel_error\n";
  for (const auto& r : results) {
    std::vector<const LevelMatch*> by_computed(r.computed.size(), nullptr);
    for (const auto& m : r.matches) by_computed[m.computed] = &m;
    for (std::size_t i = 0; i < r.computed.size(); ++i) {
      const ComputedLevel& c = r.computed[i];
      os << r.sector << ',' << c.tag << ',' << i << ',' << num(c.energy) << ',';
      if (const LevelMatch* m = by_computed[i]) {
        const PredictedLevel& p = r.predicted[m->predicted];
        os << num(p.energy) << ',' << p.n << ',' << (p.branch == ' ' ? "" : std::string(1, p.branch)) << ','
           << num(m->rel_error);
      } else {
        os << ",,,";
      }
      os << '\n';
    }
    for (std::size_t k : r.unmatched_predicted) {
      const PredictedLevel& p = r.predicted[k];
      os << r.sector << ",s_r=" << (p.s_r > 0 ? "+1/2" : p.s_r < 0 ? "-1/2" : "0") << ",,," << num(p.energy) << ','
         << p.n << ',' << (p.branch == ' ' ? "" : std::string(1, p.branch)) << ",\n";
    }
  }
  return os.str();
}

}  // namespace so4atom
