#include "roa/norms.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "roa/errors.hpp"

namespace roa {
namespace {

constexpr double kGolden = 0.6180339887498949;

class RescaledSource final : public SegmentSource {
 public:
  RescaledSource(Segment inner, double factor) : inner_(std::move(inner)), factor_(factor) {}
  void evaluate(double theta, Side side, std::span<double> out) const override {
    inner_.source().evaluate(std::max(theta * factor_, -inner_.tau()), side, out);
  }

 private:
  Segment inner_;
  double factor_;
};

double component_norm(const Segment& seg, const std::vector<std::size_t>& comps, double theta,
                      Side side, std::span<double> buf) {
  seg.source().evaluate(theta, side, buf);
  double s = 0.0;
  for (auto c : comps) s += buf[c] * buf[c];
  return std::sqrt(s);
}

}  // namespace

std::string to_string(NormKind kind) {
  switch (kind) {
    case NormKind::UniformC: return "c";
    case NormKind::M2: return "m2";
    case NormKind::QuotientQ: return "q";
  }
  return "c";
}

NormKind parse_norm_kind(const std::string& name) {
  if (name == "c" || name == "pc" || name == "uniform") return NormKind::UniformC;
  if (name == "m2") return NormKind::M2;
  if (name == "q" || name == "quotient") return NormKind::QuotientQ;
  throw ArgumentError("unknown norm '" + name + "' (expected c, m2 or q)");
}

NormSpace NormSpace::uniform(int grid_density) { return {NormKind::UniformC, {}, grid_density}; }
NormSpace NormSpace::m2(int grid_density) { return {NormKind::M2, {}, grid_density}; }
NormSpace NormSpace::quotient(Partition partition, int grid_density) {
  return {NormKind::QuotientQ, std::move(partition), grid_density};
}

NormSpace NormSpace::quotient_for(const Model& model, int grid_density) {
  if (model.partition) return quotient(*model.partition, grid_density);
  Partition all;
  for (std::size_t i = 0; i < model.dim; ++i) all.delayed.push_back(i);
  return quotient(all, grid_density);
}

void NormSpace::validate(std::size_t dim) const {
  if (grid_density < 16) throw ArgumentError("norm grid density must be at least 16");
  if (kind == NormKind::QuotientQ && !partition.valid_for(dim)) {
    throw ArgumentError("quotient partition does not match the segment dimension");
  }
}

double sup_norm(const Segment& seg, const std::vector<std::size_t>& comps, int grid_density) {
  if (comps.empty()) return 0.0;
  const double tau = seg.tau();
  const auto npts = static_cast<std::size_t>(grid_density);
  std::vector<double> buf(seg.dim());
  std::vector<double> theta(npts + 1);
  std::vector<double> g(npts + 1);
  for (std::size_t k = 0; k <= npts; ++k) {
    theta[k] = k == npts ? 0.0 : -tau + tau * static_cast<double>(k) / static_cast<double>(npts);
    g[k] = component_norm(seg, comps, theta[k], Side::Right, buf);
  }
  double best = *std::max_element(g.begin(), g.end());

  const auto& bps = seg.breakpoints();
  for (double b : bps) {
    best = std::max(best, component_norm(seg, comps, b, Side::Right, buf));
    if (b > -tau) best = std::max(best, component_norm(seg, comps, b, Side::Left, buf));
  }

  // Local maxima of the sampled profile, largest first.
  std::vector<std::size_t> peaks;
  for (std::size_t k = 0; k <= npts; ++k) {
    const bool left_ok = k == 0 || g[k] >= g[k - 1];
    const bool right_ok = k == npts || g[k] >= g[k + 1];
    if (left_ok && right_ok) peaks.push_back(k);
  }
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return g[a] > g[b]; });
  if (peaks.size() > 3) peaks.resize(3);

  for (std::size_t k : peaks) {
    double a = theta[k == 0 ? 0 : k - 1];
    double b = theta[k == npts ? npts : k + 1];
    // Stay on the smooth piece containing θ_k.
    for (double bp : bps) {
      if (bp > a && bp < b) {
        if (bp <= theta[k]) a = bp;
        if (bp >= theta[k]) b = bp;
      }
    }
    if (!(b > a)) continue;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = component_norm(seg, comps, x1, Side::Right, buf);
    double f2 = component_norm(seg, comps, x2, Side::Right, buf);
    const double tol = 1e-9 * tau;
    while (b - a > tol) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kGolden * (b - a);
        f2 = component_norm(seg, comps, x2, Side::Right, buf);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kGolden * (b - a);
        f1 = component_norm(seg, comps, x1, Side::Right, buf);
      }
    }
    best = std::max({best, f1, f2});
  }
  return best;
}

double l2_norm(const Segment& seg, int grid_density) {
  const double tau = seg.tau();
  std::vector<double> cuts{-tau};
  for (double b : seg.breakpoints()) {
    if (b > -tau && b < 0.0) cuts.push_back(b);
  }
  cuts.push_back(0.0);
  std::vector<double> buf(seg.dim());
  auto sq = [&](double theta, Side side) {
    seg.source().evaluate(theta, side, buf);
    double s = 0.0;
    for (double v : buf) s += v * v;
    return s;
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    const double len = b - a;
    if (!(len > 0.0)) continue;
    auto panels = static_cast<std::size_t>(std::ceil(grid_density * len / (2.0 * tau))) * 2;
    panels = std::max<std::size_t>(panels, 2);
    const double h = len / static_cast<double>(panels);
    double s = sq(a, Side::Right) + sq(b, Side::Left);
    for (std::size_t k = 1; k < panels; ++k) {
      s += (k % 2 == 1 ? 4.0 : 2.0) * sq(a + h * static_cast<double>(k), Side::Right);
    }
    total += s * h / 3.0;
  }
  return std::sqrt(std::max(total, 0.0));
}

double norm(const NormSpace& space, const Segment& seg) {
  space.validate(seg.dim());
  std::vector<double> v0(seg.dim());
  seg.evaluate(0.0, v0, Side::Right);
  switch (space.kind) {
    case NormKind::UniformC: {
      std::vector<std::size_t> all(seg.dim());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      return sup_norm(seg, all, space.grid_density);
    }
    case NormKind::M2: {
      double p = 0.0;
      for (double v : v0) p += v * v;
      return std::sqrt(p) + l2_norm(seg, space.grid_density);
    }
    case NormKind::QuotientQ: {
      const double hist = sup_norm(seg, space.partition.delayed, space.grid_density);
      double inst = 0.0;
      for (auto c : space.partition.instantaneous) inst += v0[c] * v0[c];
      return std::sqrt(hist * hist + inst);
    }
  }
  return 0.0;
}

Segment rescale_delay(const Segment& seg, double tau_new) {
  if (!(tau_new > 0.0) || !std::isfinite(tau_new)) throw ArgumentError("new delay must be positive");
  if (tau_new == seg.tau()) return seg;
  const double factor = seg.tau() / tau_new;
  std::vector<double> bps;
  for (double b : seg.breakpoints()) bps.push_back(std::max(b / factor, -tau_new));
  auto src = std::make_shared<RescaledSource>(seg, factor);
  return Segment(tau_new, seg.dim(), std::move(src), std::move(bps));
}

}  // namespace roa
