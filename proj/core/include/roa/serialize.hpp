#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "roa/attraction.hpp"
#include "roa/orbit.hpp"
#include "roa/spectral.hpp"

namespace roa {

// JSON writers. Output is pretty-printed with two-space indentation and keys
// in sorted order, so equal inputs give byte-identical text. Non-finite
// numbers (e.g. an unbounded radius) are written as null.

/// {"theta": [...], "values": [[...], ...], "breakpoints": [...]}; each
/// breakpoint contributes its left and right limit as two rows.
std::string segment_table_json(const Segment& seg, std::size_t points = 201);

std::string to_json(const ScanResult& result, std::size_t table_points = 201);
std::string to_json(const BasinResult& result);
std::string to_json(const Classification& c);

/// {"crossings": [...], "windows": [...], "roots": [...]} for one problem.
std::string spectrum_json(const std::vector<Crossing>& crossings, const std::vector<StabilityWindow>& windows,
                          const std::vector<CharacteristicRoot>& roots);

/// T, τ, mesh sizes, row-major nodal coefficients and solve diagnostics.
std::string to_json(const PeriodicOrbit& orbit);

struct BranchRow {
  double tau = 0.0;
  double period = 0.0;
  double r_lc_q = 0.0;
  double r_lc_c = 0.0;
};
/// Minimum cycle norms for every point of a branch.
std::vector<BranchRow> branch_rows(const Branch& branch, const NormSpace& q, const NormSpace& c);
/// Header `tau,T,R_LC_Q,R_LC_C`.
std::string branch_csv(const std::vector<BranchRow>& rows);
std::string branch_json(const Branch& branch, const std::vector<BranchRow>& rows);

/// Shortest round-trip text for a double ("inf"/"nan" kept literal for CSV).
std::string format_number(double v);

}  // namespace roa
