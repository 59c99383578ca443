// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver: runs suites, oracle sweeps, ansatz solves and spectrum
// studies, and writes JSON, markdown or CSV reports.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "so4atom/radial_spectrum.hpp"

namespace so4atom {

/// Every field has a default; config-file values sit between the defaults and
/// the command-line flags.
struct RunConfig {
  std::string command;  // verify, oracle, inverse, spin-potential, spectrum, all
  /// Suite filter; empty selects every suite.
  std::vector<std::string> suites;
  /// "symbolic", "0", "1" or "all"; unset keeps each check's own policy
  /// (spectrum: mu from the parity of 2j).
  std::optional<std::string> mu;
  /// "abstract" or "half"; unset keeps each check's own mode.
  std::optional<std::string> spin;
  std::uint64_t seed = 42;
  int points = 20;
  int states = 5;
  /// Oracle pass tolerance (default 1e-8) or spectrum match tolerance
  /// (default 1e-3).
  std::optional<double> tol;
  /// Spectrum sectors as (half-)integers, e.g. "1/2". Empty selects 1/2, 3/2.
  std::vector<std::string> j;
  double k1 = -1;
  /// Empty selects 0, 1/5, 2/5.
  std::vector<double> k2;
  int grid_n = 4000;
  double rmin = 0;
  double rmax = 200;
  int levels = 4;
  std::string format;  // empty: csv for spectrum, json otherwise
  std::string out;
  std::string config;
  std::string f_window = "-4:2";
  std::string xi1_window = "-3:1";
  std::string xi2_window = "-4:0";
};

struct ReportCheck {
  std::string id;
  std::string status;
  std::optional<std::string> expect;
  /// Relative residual or error, when the check is numeric.
  std::optional<double> residual;
  std::optional<std::string> witness;
  double elapsed_ms = 0;
  bool ok = false;
};

struct SuiteSummary {
  std::string label;
  int pass = 0;
  int fail = 0;
  double elapsed_ms = 0;
};

struct Report {
  std::string command;
  RunConfig config;
  std::vector<ReportCheck> checks;
  std::vector<SuiteSummary> suites;
  std::vector<SpectrumResult> spectra;

  int pass_count() const;
  int fail_count() const;
};

/// Executes the configured command. Throws UsageError on bad configuration.
Report execute(const RunConfig& config);

/// Report text in "json", "md" or "csv" (spectrum results only). Byte-stable
/// for identical inputs apart from elapsed_ms fields.
/// The format a run writes: the explicit choice, else the command default.
std::string report_format(const RunConfig& config);

std::string render_report(const Report& report, const std::string& format);

/// Writes the rendered report to `path`, or to `fallback` when path is empty.
void emit_report(const Report& report, const std::string& format, const std::string& path, std::ostream& fallback);

/// Full entry point: 0 when every executed check passed, 1 on a failed check,
/// 2 on usage or configuration errors.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Parses "1/2", "3/2", "0", "2" into twice the value.
int parse_half_integer(const std::string& text);

}  // namespace so4atom
