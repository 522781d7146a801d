#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace roa::testing {
namespace {

using Poly = std::vector<long double>;

long double horner(const Poly& c, long double x) {
  long double s = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
  return s;
}

// Coefficients of θ ↦ φ(θ) rewritten in u = θ + τ.
Poly shift_argument(const std::vector<double>& c, long double tau) {
  Poly r(c.size(), 0.0L);
  // φ(u − τ) = Σ c_k (u − τ)^k
  for (std::size_t k = 0; k < c.size(); ++k) {
    long double binom = 1;
    for (std::size_t j = 0; j <= k; ++j) {
      r[j] += c[k] * binom * std::pow(-tau, static_cast<long double>(k - j));
      binom = binom * static_cast<long double>(k - j) / static_cast<long double>(j + 1);
    }
  }
  return r;
}

}  // namespace

MethodOfSteps::MethodOfSteps(double a, double b, double tau, std::vector<double> history, int intervals)
    : tau_(tau), history_(std::move(history)) {
  // On each delay interval the solution is entire in u; its Taylor
  // coefficients follow from c_{j+1} = (a c_j + b d_j)/(j + 1), with d the
  // coefficients of the previous interval.
  constexpr std::size_t kTerms = 120;
  Poly prev = shift_argument(history_, tau);
  prev.resize(kTerms, 0.0L);
  long double x0 = history_.empty() ? 0.0L : history_.front();
  for (int k = 0; k < intervals; ++k) {
    Poly c(kTerms, 0.0L);
    c[0] = x0;
    for (std::size_t j = 0; j + 1 < kTerms; ++j) {
      c[j + 1] = (static_cast<long double>(a) * c[j] + static_cast<long double>(b) * prev[j]) /
                 static_cast<long double>(j + 1);
    }
    x0 = horner(c, tau);
    pieces_.push_back(c);
    prev = std::move(c);
  }
}

double MethodOfSteps::operator()(double t) const {
  if (t <= 0.0) {
    long double s = 0;
    for (auto it = history_.rbegin(); it != history_.rend(); ++it) s = s * t + *it;
    return static_cast<double>(s);
  }
  auto k = static_cast<std::size_t>(std::floor(t / tau_));
  if (k >= pieces_.size()) k = pieces_.size() - 1;
  const long double u = static_cast<long double>(t) - static_cast<long double>(k) * tau_;
  return static_cast<double>(horner(pieces_[k], u));
}

std::vector<double> swing_crossing_frequencies(double a, double a_tilde, double c) {
  const double bq = a * a - a_tilde * a_tilde - 2.0 * c;
  const double disc = bq * bq - 4.0 * c * c;
  std::vector<double> out;
  if (disc < 0.0) return out;
  for (double s : {(-bq + std::sqrt(disc)) / 2.0, (-bq - std::sqrt(disc)) / 2.0}) {
    if (s > 0.0) out.push_back(std::sqrt(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Segment random_segment(std::mt19937_64& rng, double tau, std::size_t dim, int max_jumps) {
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> npts(2, 12);
  std::uniform_int_distribution<int> njumps(0, max_jumps);
  std::vector<double> knots{-tau, 0.0};
  const int interior = npts(rng) - 2;
  for (int i = 0; i < interior; ++i) knots.push_back(-tau * unit(rng));
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  std::vector<double> jumps;
  const int nj = njumps(rng);
  for (int i = 0; i < nj && knots.size() > 2; ++i) {
    jumps.push_back(knots[1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(knots.size() - 2))]);
  }
  std::vector<double> thetas, values;
  for (double k : knots) {
    const int reps = std::count(jumps.begin(), jumps.end(), k) > 0 ? 2 : 1;
    for (int r = 0; r < reps; ++r) {
      thetas.push_back(k);
      for (std::size_t c = 0; c < dim; ++c) values.push_back(val(rng));
    }
  }
  return Segment::from_samples(tau, dim, std::move(thetas), std::move(values));
}

}  // namespace roa::testing
