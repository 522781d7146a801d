#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "roa/model.hpp"
#include "roa/segment.hpp"

namespace roa {

/// Scalar building blocks for initial functions on [−τ, 0]. Every
/// single-parameter shape is normalized so that sup|g| = 1.
enum class Shape {
  Zero,
  Constant,          // 1
  Jump,              // χ_{0}(θ): 0 on [−τ, 0), 1 at θ = 0
  LinearIncreasing,  // (θ + τ)/τ
  LinearDecreasing,  // θ/τ
  Cosine,            // cos(ωθ)
  Sine,              // sin(ωθ), rescaled when ωτ < π/2
  Legendre,          // P_0..P_d of s = 2θ/τ + 1
  Bernstein,         // B_{0,d}..B_{d,d} of s = (θ + τ)/τ
  Trigonometric,     // 1, cos(2πkθ/τ), sin(2πkθ/τ), k = 1..d
  Table,             // user piecewise polynomial in s = θ/τ, normalized
};

std::string to_string(Shape shape);
/// Accepts the kebab-case names printed by to_string.
Shape parse_shape(const std::string& name);
[[nodiscard]] bool is_basis(Shape shape);

/// Piecewise polynomial scalar profile on s = θ/τ ∈ [−1, 0]; coeffs[k]
/// multiplies (s − from)^k. Normalized to unit sup norm on construction.
struct ShapeTable {
  struct Piece {
    double from = 0.0;
    double to = 0.0;
    std::vector<double> coeffs;
  };
  std::vector<Piece> pieces;

  /// Validates coverage of [−1, 0] and divides by the sup norm.
  static std::shared_ptr<const ShapeTable> normalized(std::vector<Piece> pieces);
};

/// Component c of the initial function is shape(θ) weighted by the
/// parameters p[offset .. offset + count − 1] (one weight per basis function).
struct ComponentRule {
  Shape shape = Shape::Zero;
  std::size_t offset = 0;
};

/// A parameterized family θ ↦ φ(θ; p) that is linear in p, so
/// φ(·; −p) = −φ(·; p).
struct FamilySpec {
  std::string name;
  std::vector<ComponentRule> components;
  /// Angular frequency for Cosine/Sine; 0 selects 4π/τ.
  double omega = 0.0;
  /// Basis degree for Legendre/Bernstein/Trigonometric.
  int degree = 1;
  std::shared_ptr<const ShapeTable> table;

  [[nodiscard]] std::size_t dim() const noexcept { return components.size(); }
  [[nodiscard]] std::size_t param_dim() const;
  [[nodiscard]] bool uses_basis() const;
  /// Every component can be differentiated in closed form.
  [[nodiscard]] bool differentiable() const;
  void validate() const;

  /// Scalar family φ(θ; p) = p·shape(θ) (basis shapes take d+1 or 2d+1 weights).
  static FamilySpec scalar(Shape shape, double omega = 0.0, int degree = 1,
                           std::shared_ptr<const ShapeTable> table = nullptr);
  /// Layout driven by the model partition: instantaneous components get an
  /// independent constant, history-relevant components get `shape`, each
  /// with its own parameter(s). For the swing model this is [p₁, shape(p₂)].
  static FamilySpec for_model(const Model& model, Shape shape, double omega = 0.0, int degree = 1,
                              std::shared_ptr<const ShapeTable> table = nullptr);
};

/// Number of weights a component with this shape consumes.
std::size_t shape_param_count(Shape shape, int degree);

/// The effective angular frequency for trigonometric shapes.
double effective_omega(const FamilySpec& spec, double tau);

/// Builds φ(·; p) with exact closed-form evaluation. Throws ArgumentError
/// when p has the wrong size or τ ≤ 0.
Segment instantiate(const FamilySpec& spec, std::span<const double> p, double tau);

/// Segment source with closed-form derivatives of every order.
class DifferentiableSource : public SegmentSource {
 public:
  /// d^k φ / dθ^k (k = 0 gives φ). Throws UnsupportedFamilyError when the
  /// source has no classical derivatives.
  virtual void derivative(int k, double theta, Side side, std::span<double> out) const = 0;
  [[nodiscard]] virtual bool differentiable() const = 0;
};

/// Lifts a scalar history y₀ to [y₀, ẏ₀, …, y₀^{(n−1)}] for systems written
/// from an n-th order scalar equation. Throws UnsupportedFamilyError when y₀
/// has no closed-form derivatives (e.g. the jump family) and ArgumentError
/// when y₀ is not scalar or order < 1.
Segment scalar_lift(const Segment& y_history, std::size_t order);

}  // namespace roa
