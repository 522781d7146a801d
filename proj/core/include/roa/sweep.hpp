#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "roa/attraction.hpp"
#include "roa/orbit.hpp"

namespace roa {

/// Delay sweep over the stable windows comparing the cycle-based bound with
/// simulation-based bounds.
struct SweepConfig {
  double tau_max = 20.0;
  /// Grid spacing; samples are the multiples of tau_step inside stable
  /// windows, plus tau_max itself when it is stable.
  double tau_step = 0.5;
  int n_cheb = 32;
  /// Family and directions for the simulation bounds. `scan.families` empty
  /// selects the constant family with direction list {(0, ..., 0, −1)}.
  ScanConfig scan;
  bool simulate = true;
  StepPolicy policy;
  CollocationOptions collocation;
  int workers = 0;
};

struct SweepRow {
  double tau = 0.0;
  /// Index into the Hopf points, −1 when the window starts at τ = 0.
  int branch = -1;
  double period = kInf;
  double r_lc_q = kInf;
  double r_lc_c = kInf;
  double r_primary = kInf;
  double r_secondary = kInf;
};

struct SweepResult {
  std::vector<HopfPoint> hopf;
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;
};

SweepResult tau_sweep(const Model& model, const SweepConfig& cfg);

/// Header `tau,branch,T,R_LC_Q,R_LC_PC,R_primary,R_secondary`.
std::string sweep_csv(const SweepResult& result);

}  // namespace roa
