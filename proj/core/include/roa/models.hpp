#pragma once

#include <string>

#include "roa/model.hpp"

namespace roa {

/// Delayed swing equation shifted to its equilibrium y_e = arcsin(w):
///   ẋ₁ = x₂,  ẋ₂ = −a x₂ − ã x₂(t−τ) + w − sin(x₁ + y_e).
/// Only the history of x₂ enters, so the partition is I = {x₂}, II = {x₁}.
/// Throws ArgumentError unless a, ã > 0, w ∈ (0, 1), τ > 0.
Model make_swing(double a, double a_tilde, double w, double tau);

/// ẋ = −x − x(t−τ) + x³.
Model make_scalar_cubic(double tau);

/// ẋ = a·x + b·x(t−τ); used as the method-of-steps reference model.
Model make_linear_scalar(double a, double b, double tau);

/// Builds a model from the declarative JSON description documented in the
/// README (polynomial and sin/cos terms). Throws ArgumentError with a
/// diagnostic on malformed input.
Model model_from_json(const std::string& text);
Model load_model_file(const std::string& path);

}  // namespace roa
