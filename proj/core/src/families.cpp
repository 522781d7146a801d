#include "roa/families.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roa/errors.hpp"

namespace roa {
namespace {

constexpr double kPi = std::numbers::pi;

// Σ_m c_m · d^k/ds^k s^m evaluated at s.
double poly_derivative_value(const std::vector<double>& c, int k, double s) {
  double acc = 0.0;
  for (std::size_t m = c.size(); m-- > static_cast<std::size_t>(k);) {
    double f = 1.0;
    for (int j = 0; j < k; ++j) f *= static_cast<double>(m - static_cast<std::size_t>(j));
    acc = acc * s + c[m] * f;
  }
  return acc;
}

std::vector<std::vector<double>> legendre_power_basis(int degree) {
  std::vector<std::vector<double>> p(static_cast<std::size_t>(degree) + 1,
                                     std::vector<double>(static_cast<std::size_t>(degree) + 1, 0.0));
  p[0][0] = 1.0;
  if (degree >= 1) p[1][1] = 1.0;
  for (int k = 1; k < degree; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    for (std::size_t m = 0; m <= static_cast<std::size_t>(degree); ++m) {
      double v = -k * p[uk - 1][m];
      if (m > 0) v += (2 * k + 1) * p[uk][m - 1];
      p[uk + 1][m] = v / (k + 1);
    }
  }
  return p;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

std::vector<std::vector<double>> bernstein_power_basis(int degree) {
  const auto n = static_cast<std::size_t>(degree) + 1;
  std::vector<std::vector<double>> b(n, std::vector<double>(n, 0.0));
  for (int i = 0; i <= degree; ++i) {
    for (int j = 0; j <= degree - i; ++j) {
      b[static_cast<std::size_t>(i)][static_cast<std::size_t>(i + j)] =
          binomial(degree, i) * binomial(degree - i, j) * ((j % 2) ? -1.0 : 1.0);
    }
  }
  return b;
}

double table_sup(const std::vector<ShapeTable::Piece>& pieces) {
  double best = 0.0;
  for (const auto& pc : pieces) {
    const int samples = 256;
    for (int k = 0; k <= samples; ++k) {
      const double s = (pc.to - pc.from) * k / samples;
      best = std::max(best, std::abs(poly_derivative_value(pc.coeffs, 0, s)));
    }
  }
  return best;
}

struct ShapeContext {
  double tau = 1.0;
  double omega = 0.0;
  double sine_scale = 1.0;
  int degree = 1;
  std::vector<std::vector<double>> poly;  // Legendre/Bernstein power coefficients
  std::shared_ptr<const ShapeTable> table;
};

// k-th θ-derivative of basis function j of `shape`.
double shape_derivative(Shape shape, std::size_t j, int k, double theta, Side side,
                        const ShapeContext& ctx) {
  const double tau = ctx.tau;
  switch (shape) {
    case Shape::Zero: return 0.0;
    case Shape::Constant: return k == 0 ? 1.0 : 0.0;
    case Shape::Jump:
      if (k > 0) throw UnsupportedFamilyError("the jump family has no classical derivatives");
      return (theta == 0.0 && side == Side::Right) ? 1.0 : 0.0;
    case Shape::LinearIncreasing:
      return k == 0 ? (theta + tau) / tau : (k == 1 ? 1.0 / tau : 0.0);
    case Shape::LinearDecreasing:
      return k == 0 ? theta / tau : (k == 1 ? 1.0 / tau : 0.0);
    case Shape::Cosine:
      return std::pow(ctx.omega, k) * std::cos(ctx.omega * theta + k * kPi / 2.0);
    case Shape::Sine:
      return std::pow(ctx.omega, k) * std::sin(ctx.omega * theta + k * kPi / 2.0) / ctx.sine_scale;
    case Shape::Legendre: {
      const double c = 2.0 / tau;
      return std::pow(c, k) * poly_derivative_value(ctx.poly[j], k, c * theta + 1.0);
    }
    case Shape::Bernstein: {
      const double c = 1.0 / tau;
      return std::pow(c, k) * poly_derivative_value(ctx.poly[j], k, c * (theta + tau));
    }
    case Shape::Trigonometric: {
      if (j == 0) return k == 0 ? 1.0 : 0.0;
      const double nu = 2.0 * kPi * static_cast<double>((j + 1) / 2) / tau;
      const double phase = (j % 2 == 1) ? kPi / 2.0 : 0.0;  // cos for odd j, sin for even j
      return std::pow(nu, k) * std::sin(nu * theta + phase + k * kPi / 2.0);
    }
    case Shape::Table: {
      const auto& pieces = ctx.table->pieces;
      if (k > 0 && pieces.size() > 1) {
        throw UnsupportedFamilyError("piecewise tables have no closed-form derivatives");
      }
      const double s = theta / tau;
      std::size_t idx = 0;
      while (idx + 1 < pieces.size() &&
             (s > pieces[idx].to || (s == pieces[idx].to && side == Side::Right))) {
        ++idx;
      }
      return std::pow(1.0 / tau, k) * poly_derivative_value(pieces[idx].coeffs, k, s - pieces[idx].from);
    }
  }
  return 0.0;
}

class FamilySource final : public DifferentiableSource {
 public:
  struct Component {
    Shape shape;
    std::vector<double> weights;
  };

  FamilySource(ShapeContext ctx, std::vector<Component> comps, bool smooth)
      : ctx_(std::move(ctx)), comps_(std::move(comps)), smooth_(smooth) {}

  void evaluate(double theta, Side side, std::span<double> out) const override {
    derivative(0, theta, side, out);
  }

  void derivative(int k, double theta, Side side, std::span<double> out) const override {
    for (std::size_t c = 0; c < comps_.size(); ++c) {
      double acc = 0.0;
      const auto& comp = comps_[c];
      for (std::size_t j = 0; j < comp.weights.size(); ++j) {
        if (comp.weights[j] != 0.0 || k > 0) {
          acc += comp.weights[j] * shape_derivative(comp.shape, j, k, theta, side, ctx_);
        }
      }
      out[c] = acc;
    }
  }

  [[nodiscard]] bool differentiable() const override { return smooth_; }

 private:
  ShapeContext ctx_;
  std::vector<Component> comps_;
  bool smooth_;
};

class LiftSource final : public SegmentSource {
 public:
  LiftSource(std::shared_ptr<const DifferentiableSource> base, std::size_t order)
      : base_(std::move(base)), order_(order) {}

  void evaluate(double theta, Side side, std::span<double> out) const override {
    double v = 0.0;
    for (std::size_t k = 0; k < order_; ++k) {
      base_->derivative(static_cast<int>(k), theta, side, {&v, 1});
      out[k] = v;
    }
  }

 private:
  std::shared_ptr<const DifferentiableSource> base_;
  std::size_t order_;
};

bool shape_smooth(Shape s, const ShapeTable* table) {
  if (s == Shape::Jump) return false;
  if (s == Shape::Table) return table != nullptr && table->pieces.size() == 1;
  return true;
}

}  // namespace

std::string to_string(Shape shape) {
  switch (shape) {
    case Shape::Zero: return "zero";
    case Shape::Constant: return "constant";
    case Shape::Jump: return "jump";
    case Shape::LinearIncreasing: return "linear-increasing";
    case Shape::LinearDecreasing: return "linear-decreasing";
    case Shape::Cosine: return "cosine";
    case Shape::Sine: return "sine";
    case Shape::Legendre: return "legendre";
    case Shape::Bernstein: return "bernstein";
    case Shape::Trigonometric: return "trigonometric";
    case Shape::Table: return "table";
  }
  return "zero";
}

Shape parse_shape(const std::string& name) {
  for (Shape s : {Shape::Zero, Shape::Constant, Shape::Jump, Shape::LinearIncreasing,
                  Shape::LinearDecreasing, Shape::Cosine, Shape::Sine, Shape::Legendre,
                  Shape::Bernstein, Shape::Trigonometric, Shape::Table}) {
    if (to_string(s) == name) return s;
  }
  if (name == "step") return Shape::Jump;
  throw ArgumentError("unknown family shape '" + name + "'");
}

bool is_basis(Shape shape) {
  return shape == Shape::Legendre || shape == Shape::Bernstein || shape == Shape::Trigonometric;
}

std::size_t shape_param_count(Shape shape, int degree) {
  switch (shape) {
    case Shape::Zero: return 0;
    case Shape::Legendre:
    case Shape::Bernstein: return static_cast<std::size_t>(degree) + 1;
    case Shape::Trigonometric: return 2 * static_cast<std::size_t>(degree) + 1;
    default: return 1;
  }
}

std::shared_ptr<const ShapeTable> ShapeTable::normalized(std::vector<Piece> pieces) {
  if (pieces.empty()) throw ArgumentError("shape table needs at least one piece");
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.from < b.from; });
  const double tol = 1e-12;
  if (std::abs(pieces.front().from + 1.0) > tol || std::abs(pieces.back().to) > tol) {
    throw ArgumentError("shape table must cover s in [-1, 0]");
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!(pieces[i].to > pieces[i].from)) throw ArgumentError("shape table piece has empty extent");
    if (pieces[i].coeffs.empty()) throw ArgumentError("shape table piece has no coefficients");
    if (i > 0 && std::abs(pieces[i].from - pieces[i - 1].to) > tol) {
      throw ArgumentError("shape table pieces must be contiguous");
    }
  }
  const double sup = table_sup(pieces);
  if (!(sup > 0.0)) throw ArgumentError("shape table is identically zero");
  for (auto& pc : pieces) {
    for (double& c : pc.coeffs) c /= sup;
  }
  auto t = std::make_shared<ShapeTable>();
  t->pieces = std::move(pieces);
  return t;
}

std::size_t FamilySpec::param_dim() const {
  std::size_t m = 0;
  for (const auto& c : components) m = std::max(m, c.offset + shape_param_count(c.shape, degree));
  return m;
}

bool FamilySpec::uses_basis() const {
  return std::any_of(components.begin(), components.end(), [](const auto& c) { return is_basis(c.shape); });
}

bool FamilySpec::differentiable() const {
  return std::all_of(components.begin(), components.end(),
                     [&](const auto& c) { return shape_smooth(c.shape, table.get()); });
}

void FamilySpec::validate() const {
  if (components.empty()) throw ArgumentError("family has no components");
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw ArgumentError("family frequency must be >= 0");
  if (uses_basis() && (degree < 1 || degree > 24)) {
    throw ArgumentError("basis degree must lie in [1, 24]");
  }
  for (const auto& c : components) {
    if (c.shape == Shape::Table && !table) throw ArgumentError("table family without a table");
  }
  if (param_dim() == 0) throw ArgumentError("family has no parameters");
}

FamilySpec FamilySpec::scalar(Shape shape, double omega, int degree, std::shared_ptr<const ShapeTable> table) {
  FamilySpec f;
  f.name = to_string(shape);
  f.components = {{shape, 0}};
  f.omega = omega;
  f.degree = degree;
  f.table = std::move(table);
  return f;
}

FamilySpec FamilySpec::for_model(const Model& model, Shape shape, double omega, int degree,
                                 std::shared_ptr<const ShapeTable> table) {
  FamilySpec f;
  f.name = to_string(shape);
  f.omega = omega;
  f.degree = degree;
  f.table = std::move(table);
  std::vector<bool> instantaneous(model.dim, false);
  if (model.partition) {
    for (auto c : model.partition->instantaneous) {
      if (c < model.dim) instantaneous[c] = true;
    }
  }
  std::size_t offset = 0;
  for (std::size_t c = 0; c < model.dim; ++c) {
    const Shape s = instantaneous[c] ? Shape::Constant : shape;
    f.components.push_back({s, offset});
    offset += shape_param_count(s, degree);
  }
  return f;
}

double effective_omega(const FamilySpec& spec, double tau) {
  return spec.omega > 0.0 ? spec.omega : 4.0 * kPi / tau;
}

Segment instantiate(const FamilySpec& spec, std::span<const double> p, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ArgumentError("delay must be positive");
  spec.validate();
  if (p.size() != spec.param_dim()) {
    throw ArgumentError("family '" + spec.name + "' expects " + std::to_string(spec.param_dim()) +
                        " parameters, got " + std::to_string(p.size()));
  }
  ShapeContext ctx;
  ctx.tau = tau;
  ctx.degree = spec.degree;
  ctx.omega = effective_omega(spec, tau);
  ctx.sine_scale = ctx.omega * tau < kPi / 2.0 ? std::sin(ctx.omega * tau) : 1.0;
  ctx.table = spec.table;

  std::vector<double> bps;
  std::vector<FamilySource::Component> comps;
  bool smooth = true;
  bool need_legendre = false;
  bool need_bernstein = false;
  for (const auto& rule : spec.components) {
    const std::size_t cnt = shape_param_count(rule.shape, spec.degree);
    comps.push_back({rule.shape, std::vector<double>(p.begin() + static_cast<std::ptrdiff_t>(rule.offset),
                                                     p.begin() + static_cast<std::ptrdiff_t>(rule.offset + cnt))});
    smooth = smooth && shape_smooth(rule.shape, spec.table.get());
    if (rule.shape == Shape::Jump) bps.push_back(0.0);
    if (rule.shape == Shape::Table) {
      for (std::size_t i = 1; i < spec.table->pieces.size(); ++i) bps.push_back(spec.table->pieces[i].from * tau);
    }
    need_legendre = need_legendre || rule.shape == Shape::Legendre;
    need_bernstein = need_bernstein || rule.shape == Shape::Bernstein;
  }
  if (need_legendre && need_bernstein) {
    throw ArgumentError("a family may not mix Legendre and Bernstein components");
  }
  if (need_legendre) ctx.poly = legendre_power_basis(spec.degree);
  if (need_bernstein) ctx.poly = bernstein_power_basis(spec.degree);
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  auto src = std::make_shared<FamilySource>(std::move(ctx), std::move(comps), smooth);
  return Segment(tau, spec.dim(), std::move(src), std::move(bps));
}

Segment scalar_lift(const Segment& y_history, std::size_t order) {
  if (y_history.dim() != 1) throw ArgumentError("scalar_lift expects a scalar history");
  if (order < 1) throw ArgumentError("lift order must be at least 1");
  auto base = std::dynamic_pointer_cast<const DifferentiableSource>(y_history.source_ptr());
  if (!base) throw UnsupportedFamilyError("history has no closed-form derivatives");
  if (order > 1 && !base->differentiable()) {
    throw UnsupportedFamilyError("history is not differentiable in closed form");
  }
  auto src = std::make_shared<LiftSource>(std::move(base), order);
  return Segment(y_history.tau(), order, std::move(src), y_history.breakpoints());
}

}  // namespace roa
