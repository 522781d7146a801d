#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>

#include "roa/errors.hpp"
#include "roa/norms.hpp"

namespace roa {
namespace {

// Sliding maximum of `g` over windows [i, i + width].
std::vector<double> sliding_max(const std::vector<double>& g, std::size_t width, std::size_t count) {
  std::vector<double> out(count);
  std::deque<std::size_t> dq;
  std::size_t next = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t hi = i + width;
    while (next <= hi) {
      while (!dq.empty() && g[dq.back()] <= g[next]) dq.pop_back();
      dq.push_back(next++);
    }
    while (dq.front() < i) dq.pop_front();
    out[i] = g[dq.front()];
  }
  return out;
}

double exact_norm(const Trajectory& traj, const NormSpace& space, double t) {
  const auto xe = traj.model().equilibrium_point();
  return norm(space, shift(segment_at(traj, t), xe));
}

}  // namespace

NormTrace norm_trace(const Trajectory& traj, const NormSpace& space) {
  const std::size_t n = traj.model().dim;
  space.validate(n);
  const double tau = traj.tau();
  const double t_end = traj.t_end();
  const auto width = static_cast<std::size_t>(space.grid_density);
  const double dt = tau / static_cast<double>(width);
  const auto xe = traj.model().equilibrium_point();

  const auto steps = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
  const std::size_t count = steps + 1;      // trace times iΔ, i = 0..steps
  const std::size_t samples = steps + width + 1;  // s_j = −τ + jΔ

  std::vector<std::size_t> block_i;
  std::vector<std::size_t> block_ii;
  if (space.kind == NormKind::QuotientQ) {
    block_i = space.partition.delayed;
    block_ii = space.partition.instantaneous;
  } else {
    for (std::size_t c = 0; c < n; ++c) block_i.push_back(c);
  }

  std::vector<double> g(samples);    // |x − x_e| over the sup block
  std::vector<double> sq(samples);   // |x − x_e|² over all components (M²)
  std::vector<double> inst(samples); // |x^II − x_e^II|² (Q)
  std::vector<double> v(n);
  auto block_norm = [&](const std::vector<std::size_t>& comps) {
    double s = 0.0;
    for (auto c : comps) s += (v[c] - xe[c]) * (v[c] - xe[c]);
    return s;
  };
  const auto& bps = traj.initial().breakpoints();
  for (std::size_t j = 0; j < samples; ++j) {
    const double s = std::min(-tau + static_cast<double>(j) * dt, t_end);
    traj.at(s, v);
    g[j] = std::sqrt(block_norm(block_i));
    inst[j] = block_norm(block_ii);
    double all = 0.0;
    for (std::size_t c = 0; c < n; ++c) all += (v[c] - xe[c]) * (v[c] - xe[c]);
    sq[j] = all;
    // Fold jump values of the history into the cell that contains them.
    if (j > 0) {
      const double prev = s - dt;
      for (double b : bps) {
        if (b > prev && b <= s && b <= 0.0) {
          for (Side side : {Side::Left, Side::Right}) {
            traj.initial().evaluate(b, v, side);
            g[j] = std::max(g[j], std::sqrt(block_norm(block_i)));
          }
        }
      }
    }
  }

  NormTrace trace;
  trace.t.resize(count);
  trace.value.resize(count);
  for (std::size_t i = 0; i < count; ++i) trace.t[i] = static_cast<double>(i) * dt;

  switch (space.kind) {
    case NormKind::UniformC: {
      trace.value = sliding_max(g, width, count);
      break;
    }
    case NormKind::QuotientQ: {
      const auto hist = sliding_max(g, width, count);
      for (std::size_t i = 0; i < count; ++i) {
        trace.value[i] = std::sqrt(hist[i] * hist[i] + inst[i + width]);
      }
      break;
    }
    case NormKind::M2: {
      std::vector<double> prefix(samples, 0.0);
      for (std::size_t j = 1; j < samples; ++j) prefix[j] = prefix[j - 1] + 0.5 * dt * (sq[j - 1] + sq[j]);
      for (std::size_t i = 0; i < count; ++i) {
        const double integral = std::max(prefix[i + width] - prefix[i], 0.0);
        trace.value[i] = std::sqrt(sq[i + width]) + std::sqrt(integral);
      }
      break;
    }
  }

  // Exact values at both ends.
  trace.value.front() = exact_norm(traj, space, 0.0);
  if (t_end - trace.t.back() > 1e-9 * dt) {
    trace.t.push_back(t_end);
    trace.value.push_back(exact_norm(traj, space, t_end));
  } else {
    trace.value.back() = exact_norm(traj, space, trace.t.back());
  }
  return trace;
}

TraceMinimum refine_trace_minimum(const Trajectory& traj, const NormSpace& space,
                                  const NormTrace& trace, std::size_t candidates) {
  if (trace.t.empty()) throw ArgumentError("empty norm trace");
  const auto& f = trace.value;
  const std::size_t n = f.size();
  std::vector<std::size_t> minima;
  for (std::size_t i = 0; i < n; ++i) {
    const bool l = i == 0 || f[i] <= f[i - 1];
    const bool r = i + 1 == n || f[i] <= f[i + 1];
    if (l && r) minima.push_back(i);
  }
  std::sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
  if (minima.size() > candidates) minima.resize(candidates);

  TraceMinimum best{exact_norm(traj, space, 0.0), 0.0};
  auto consider = [&](double t) {
    const double v = exact_norm(traj, space, t);
    if (v < best.value) best = {v, t};
    return v;
  };
  for (std::size_t i : minima) {
    const double t0 = trace.t[i];
    const double f0 = consider(t0);
    if (i == 0 || i + 1 == n) continue;
    const double tl = trace.t[i - 1];
    const double tr = trace.t[i + 1];
    const double fl = consider(tl);
    const double fr = consider(tr);
    const double hl = t0 - tl;
    const double hr = tr - t0;
    // Vertex of the parabola through the three (possibly uneven) points.
    const double num = hl * hl * (f0 - fr) - hr * hr * (f0 - fl);
    const double den = hl * (f0 - fr) + hr * (f0 - fl);
    if (den == 0.0) continue;
    const double ts = t0 - 0.5 * num / den;
    if (ts > tl && ts < tr) consider(ts);
  }
  return best;
}

std::string norm_trace_csv(const NormTrace& trace) {
  std::string out = "t,norm\n";
  char buf[64];
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", trace.t[i], trace.value[i]);
    out += buf;
  }
  return out;
}

}  // namespace roa
