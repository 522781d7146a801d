#pragma once

#include "roa/orbit.hpp"

namespace roa::detail {

// Collocation solves whose phase condition uses `ref` instead of the guess.
PeriodicOrbit solve_with_reference(const Model& model, double tau, const PeriodicOrbit& guess,
                                   const PeriodicOrbit& ref, const CollocationOptions& opts);
PeriodicOrbit solve_amplitude_with_reference(const Model& model, double amplitude, const PeriodicOrbit& guess,
                                             const PeriodicOrbit& ref, const CollocationOptions& opts);

}  // namespace roa::detail
