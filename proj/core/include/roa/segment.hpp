#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace roa {

/// Which one-sided limit to take at a jump breakpoint.
enum class Side { Right, Left };

/// Evaluator behind a Segment. Implementations are immutable and may be
/// shared between segments and threads.
class SegmentSource {
 public:
  virtual ~SegmentSource() = default;
  /// Writes φ(θ) (or its left limit) into `out`; θ is already range-checked.
  virtual void evaluate(double theta, Side side, std::span<double> out) const = 0;
};

/// A function on [−τ, 0] with values in ℝⁿ: an initial function or a state
/// x_t of a solution. At a jump breakpoint the stored value is the
/// right-hand limit; the left-hand limit is available via Side::Left.
class Segment {
 public:
  Segment(double tau, std::size_t dim, std::shared_ptr<const SegmentSource> source,
          std::vector<double> breakpoints = {});

  [[nodiscard]] double tau() const noexcept { return tau_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  /// Sorted, strictly increasing, all inside [−τ, 0].
  [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  [[nodiscard]] const SegmentSource& source() const noexcept { return *source_; }
  [[nodiscard]] std::shared_ptr<const SegmentSource> source_ptr() const noexcept { return source_; }

  /// Throws RangeError when θ ∉ [−τ, 0] (with a tiny relative slack).
  void evaluate(double theta, std::span<double> out, Side side = Side::Right) const;
  [[nodiscard]] std::vector<double> operator()(double theta) const;
  [[nodiscard]] std::vector<double> left_limit(double theta) const;

  static Segment constant(double tau, std::vector<double> value);
  static Segment zero(double tau, std::size_t dim);

  /// Piecewise-linear interpolant through (θ_k, v_k). A repeated θ encodes a
  /// jump: the first sample is the left limit, the second the right limit.
  /// Interior abscissae are reported as breakpoints.
  /// `values` is row-major, one row of `dim` entries per sample.
  static Segment from_samples(double tau, std::size_t dim, std::vector<double> thetas,
                              std::vector<double> values);

 private:
  double tau_;
  std::size_t dim_;
  std::shared_ptr<const SegmentSource> source_;
  std::vector<double> breakpoints_;
};

/// Power-basis polynomial pieces on consecutive intervals of [−τ, 0].
struct PolynomialPiece {
  double from = 0.0;
  double to = 0.0;
  /// coeffs[c][k] multiplies (θ − from)^k for component c.
  std::vector<std::vector<double>> coeffs;
};

class PiecewisePolynomialSource final : public SegmentSource {
 public:
  PiecewisePolynomialSource(std::size_t dim, std::vector<PolynomialPiece> pieces);
  void evaluate(double theta, Side side, std::span<double> out) const override;
  [[nodiscard]] const std::vector<PolynomialPiece>& pieces() const noexcept { return pieces_; }

 private:
  std::size_t dim_;
  std::vector<PolynomialPiece> pieces_;
};

/// Segment from a piecewise polynomial table covering [−τ, 0] without gaps.
Segment make_piecewise_polynomial(double tau, std::size_t dim, std::vector<PolynomialPiece> pieces);

/// α·a + β·b, pointwise (both segments on the same domain and dimension).
Segment linear_combination(double alpha, const Segment& a, double beta, const Segment& b);
Segment scale(const Segment& seg, double alpha);
/// φ(θ) − c: the deviation of a state from an equilibrium value c.
Segment shift(const Segment& seg, std::span<const double> c);

/// Samples the segment on `count` uniform points plus every breakpoint (both
/// limits), producing the table consumed by Segment::from_samples.
struct SegmentTable {
  std::vector<double> thetas;
  std::vector<double> values;  // row-major
};
SegmentTable sample(const Segment& seg, std::size_t count);

}  // namespace roa
