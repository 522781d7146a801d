#include "roa/segment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <utility>

#include "roa/errors.hpp"

namespace roa {
namespace {

std::vector<double> normalize_breakpoints(std::vector<double> bps, double tau) {
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  for (double b : bps) {
    if (b < -tau * (1.0 + 1e-12) - 1e-14 || b > 1e-14 * tau) {
      std::ostringstream msg;
      msg << "breakpoint " << b << " outside [-" << tau << ", 0]";
      throw ArgumentError(msg.str());
    }
  }
  return bps;
}

class ConstantSource final : public SegmentSource {
 public:
  explicit ConstantSource(std::vector<double> v) : value_(std::move(v)) {}
  void evaluate(double, Side, std::span<double> out) const override {
    std::copy(value_.begin(), value_.end(), out.begin());
  }

 private:
  std::vector<double> value_;
};

class PiecewiseLinearSource final : public SegmentSource {
 public:
  PiecewiseLinearSource(std::size_t dim, std::vector<double> thetas, std::vector<double> values)
      : dim_(dim), thetas_(std::move(thetas)), values_(std::move(values)) {}

  void evaluate(double theta, Side side, std::span<double> out) const override {
    const std::size_t count = thetas_.size();
    std::size_t lo = 0;
    std::size_t hi = 0;
    if (side == Side::Right) {
      auto it = std::upper_bound(thetas_.begin(), thetas_.end(), theta);
      if (it == thetas_.begin()) return copy_row(0, out);
      lo = static_cast<std::size_t>(it - thetas_.begin()) - 1;
      if (lo + 1 >= count) return copy_row(count - 1, out);
      hi = lo + 1;
    } else {
      auto it = std::lower_bound(thetas_.begin(), thetas_.end(), theta);
      if (it == thetas_.end()) return copy_row(count - 1, out);
      hi = static_cast<std::size_t>(it - thetas_.begin());
      if (hi == 0) return copy_row(0, out);
      lo = hi - 1;
    }
    const double w = (theta - thetas_[lo]) / (thetas_[hi] - thetas_[lo]);
    for (std::size_t c = 0; c < dim_; ++c) {
      out[c] = (1.0 - w) * values_[lo * dim_ + c] + w * values_[hi * dim_ + c];
    }
  }

 private:
  void copy_row(std::size_t row, std::span<double> out) const {
    for (std::size_t c = 0; c < dim_; ++c) out[c] = values_[row * dim_ + c];
  }

  std::size_t dim_;
  std::vector<double> thetas_;
  std::vector<double> values_;
};

class LinearCombinationSource final : public SegmentSource {
 public:
  LinearCombinationSource(double alpha, Segment a, double beta, Segment b)
      : alpha_(alpha), beta_(beta), a_(std::move(a)), b_(std::move(b)) {}

  void evaluate(double theta, Side side, std::span<double> out) const override {
    const std::size_t n = out.size();
    std::array<double, 16> small{};
    std::vector<double> heap;
    std::span<double> tmp;
    if (n <= small.size()) {
      tmp = std::span<double>(small.data(), n);
    } else {
      heap.resize(n);
      tmp = heap;
    }
    a_.source().evaluate(theta, side, out);
    b_.source().evaluate(theta, side, tmp);
    for (std::size_t i = 0; i < n; ++i) out[i] = alpha_ * out[i] + beta_ * tmp[i];
  }

 private:
  double alpha_;
  double beta_;
  Segment a_;
  Segment b_;
};

class ShiftSource final : public SegmentSource {
 public:
  ShiftSource(Segment inner, std::vector<double> c) : inner_(std::move(inner)), c_(std::move(c)) {}
  void evaluate(double theta, Side side, std::span<double> out) const override {
    inner_.source().evaluate(theta, side, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= c_[i];
  }

 private:
  Segment inner_;
  std::vector<double> c_;
};

double horner(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace

Segment::Segment(double tau, std::size_t dim, std::shared_ptr<const SegmentSource> source,
                 std::vector<double> breakpoints)
    : tau_(tau), dim_(dim), source_(std::move(source)) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ArgumentError("segment delay must be positive");
  if (dim == 0) throw ArgumentError("segment dimension must be positive");
  if (!source_) throw ArgumentError("segment source is null");
  breakpoints_ = normalize_breakpoints(std::move(breakpoints), tau);
}

void Segment::evaluate(double theta, std::span<double> out, Side side) const {
  const double slack = 1e-12 * tau_ + 1e-14;
  if (theta < -tau_ - slack || theta > slack || std::isnan(theta)) {
    std::ostringstream msg;
    msg << "theta " << theta << " outside [-" << tau_ << ", 0]";
    throw RangeError(msg.str());
  }
  if (out.size() != dim_) throw ArgumentError("output span has wrong dimension");
  theta = std::clamp(theta, -tau_, 0.0);
  source_->evaluate(theta, side, out);
}

std::vector<double> Segment::operator()(double theta) const {
  std::vector<double> v(dim_);
  evaluate(theta, v, Side::Right);
  return v;
}

std::vector<double> Segment::left_limit(double theta) const {
  std::vector<double> v(dim_);
  evaluate(theta, v, Side::Left);
  return v;
}

Segment Segment::constant(double tau, std::vector<double> value) {
  const std::size_t n = value.size();
  return Segment(tau, n, std::make_shared<ConstantSource>(std::move(value)));
}

Segment Segment::zero(double tau, std::size_t dim) {
  return constant(tau, std::vector<double>(dim, 0.0));
}

Segment Segment::from_samples(double tau, std::size_t dim, std::vector<double> thetas,
                              std::vector<double> values) {
  if (thetas.empty()) throw ArgumentError("sample table is empty");
  if (values.size() != thetas.size() * dim) throw ArgumentError("sample table shape mismatch");
  if (!std::is_sorted(thetas.begin(), thetas.end())) {
    throw ArgumentError("sample abscissae must be non-decreasing");
  }
  // Interior abscissae are kinks (or jumps), so all of them become breakpoints.
  std::vector<double> bps;
  for (std::size_t i = 1; i < thetas.size(); ++i) {
    if (thetas[i] == thetas[i - 1]) {
      if (i >= 2 && thetas[i - 2] == thetas[i]) {
        throw ArgumentError("at most two samples may share an abscissa");
      }
      bps.push_back(thetas[i]);
    } else if (i + 1 < thetas.size()) {
      bps.push_back(thetas[i]);
    }
  }
  auto src = std::make_shared<PiecewiseLinearSource>(dim, std::move(thetas), std::move(values));
  return Segment(tau, dim, std::move(src), std::move(bps));
}

PiecewisePolynomialSource::PiecewisePolynomialSource(std::size_t dim,
                                                     std::vector<PolynomialPiece> pieces)
    : dim_(dim), pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw ArgumentError("piecewise polynomial needs at least one piece");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (!(p.to > p.from)) throw ArgumentError("polynomial piece has empty interval");
    if (p.coeffs.size() != dim_) throw ArgumentError("polynomial piece has wrong component count");
    if (i > 0 && std::abs(pieces_[i - 1].to - p.from) > 1e-12 * (1.0 + std::abs(p.from))) {
      throw ArgumentError("polynomial pieces must be contiguous");
    }
  }
}

void PiecewisePolynomialSource::evaluate(double theta, Side side, std::span<double> out) const {
  // Right: piece with from ≤ θ < to; Left: piece with from < θ ≤ to.
  std::size_t idx = 0;
  if (side == Side::Right) {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), theta,
                               [](double t, const PolynomialPiece& p) { return t < p.from; });
    idx = it == pieces_.begin() ? 0 : static_cast<std::size_t>(it - pieces_.begin()) - 1;
  } else {
    auto it = std::lower_bound(pieces_.begin(), pieces_.end(), theta,
                               [](const PolynomialPiece& p, double t) { return p.to < t; });
    idx = it == pieces_.end() ? pieces_.size() - 1 : static_cast<std::size_t>(it - pieces_.begin());
  }
  const auto& piece = pieces_[idx];
  const double x = theta - piece.from;
  for (std::size_t c = 0; c < dim_; ++c) out[c] = horner(piece.coeffs[c], x);
}

Segment make_piecewise_polynomial(double tau, std::size_t dim, std::vector<PolynomialPiece> pieces) {
  if (pieces.empty()) throw ArgumentError("piecewise polynomial needs at least one piece");
  const double tol = 1e-9 * tau;
  if (std::abs(pieces.front().from + tau) > tol || std::abs(pieces.back().to) > tol) {
    throw ArgumentError("polynomial pieces must cover [-tau, 0]");
  }
  std::vector<double> bps;
  for (std::size_t i = 1; i < pieces.size(); ++i) bps.push_back(pieces[i].from);
  auto src = std::make_shared<PiecewisePolynomialSource>(dim, std::move(pieces));
  return Segment(tau, dim, std::move(src), std::move(bps));
}

Segment linear_combination(double alpha, const Segment& a, double beta, const Segment& b) {
  if (a.dim() != b.dim()) throw ArgumentError("segment dimensions differ");
  if (std::abs(a.tau() - b.tau()) > 1e-12 * a.tau()) throw ArgumentError("segment domains differ");
  std::vector<double> bps = a.breakpoints();
  bps.insert(bps.end(), b.breakpoints().begin(), b.breakpoints().end());
  auto src = std::make_shared<LinearCombinationSource>(alpha, a, beta, b);
  return Segment(a.tau(), a.dim(), std::move(src), std::move(bps));
}

Segment scale(const Segment& seg, double alpha) {
  return linear_combination(alpha, seg, 0.0, Segment::zero(seg.tau(), seg.dim()));
}

Segment shift(const Segment& seg, std::span<const double> c) {
  if (c.size() != seg.dim()) throw ArgumentError("shift vector has wrong dimension");
  if (std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; })) return seg;
  auto src = std::make_shared<ShiftSource>(seg, std::vector<double>(c.begin(), c.end()));
  return Segment(seg.tau(), seg.dim(), std::move(src), seg.breakpoints());
}

SegmentTable sample(const Segment& seg, std::size_t count) {
  if (count < 2) throw ArgumentError("need at least two samples");
  const double tau = seg.tau();
  const std::size_t n = seg.dim();
  SegmentTable table;
  std::vector<double> buf(n);
  auto push = [&](double theta, Side side) {
    seg.evaluate(theta, buf, side);
    table.thetas.push_back(theta);
    table.values.insert(table.values.end(), buf.begin(), buf.end());
  };
  const auto& bps = seg.breakpoints();
  std::size_t next_bp = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double theta = k + 1 == count ? 0.0 : -tau + tau * static_cast<double>(k) / (count - 1);
    while (next_bp < bps.size() && bps[next_bp] <= theta) {
      const double b = bps[next_bp++];
      if (b > -tau) push(b, Side::Left);
      push(b, Side::Right);
    }
    if (!table.thetas.empty() && table.thetas.back() == theta) continue;
    push(theta, Side::Right);
  }
  return table;
}

}  // namespace roa
