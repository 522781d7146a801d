#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "roa/errors.hpp"
#include "roa/models.hpp"

namespace roa {
namespace {

using nlohmann::json;

enum class TrigKind { None, Sin, Cos };

// coef · Π x_i^{px_i} · Π xd_i^{pd_i} · trig(Σ α_i x_i + Σ β_i xd_i + shift)
struct Term {
  double coef = 0.0;
  std::vector<int> px;
  std::vector<int> pd;
  TrigKind trig = TrigKind::None;
  std::vector<double> alpha;
  std::vector<double> beta;
  double shift = 0.0;
};

double ipow(double v, int p) {
  double r = 1.0;
  for (int k = 0; k < p; ++k) r *= v;
  return r;
}

double monomial(const Term& t, std::span<const double> x, std::span<const double> xd) {
  double m = t.coef;
  for (std::size_t i = 0; i < x.size(); ++i) m *= ipow(x[i], t.px[i]) * ipow(xd[i], t.pd[i]);
  return m;
}

double trig_arg(const Term& t, std::span<const double> x, std::span<const double> xd) {
  double s = t.shift;
  for (std::size_t i = 0; i < x.size(); ++i) s += t.alpha[i] * x[i] + t.beta[i] * xd[i];
  return s;
}

double trig_value(const Term& t, double arg) {
  switch (t.trig) {
    case TrigKind::Sin: return std::sin(arg);
    case TrigKind::Cos: return std::cos(arg);
    case TrigKind::None: break;
  }
  return 1.0;
}

double trig_slope(const Term& t, double arg) {
  switch (t.trig) {
    case TrigKind::Sin: return std::cos(arg);
    case TrigKind::Cos: return -std::sin(arg);
    case TrigKind::None: break;
  }
  return 0.0;
}

// ∂/∂v_j of Π v_i^{p_i}·(other factors folded into `rest`).
double dmonomial(const Term& t, std::span<const double> x, std::span<const double> xd, bool delayed,
                 std::size_t j) {
  const auto& pw = delayed ? t.pd : t.px;
  if (pw[j] == 0) return 0.0;
  double m = t.coef;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int ppx = t.px[i] - ((!delayed && i == j) ? 1 : 0);
    const int ppd = t.pd[i] - ((delayed && i == j) ? 1 : 0);
    m *= ipow(x[i], ppx) * ipow(xd[i], ppd);
  }
  return m * pw[j];
}

std::vector<int> read_powers(const json& j, const char* key, std::size_t n) {
  std::vector<int> out(n, 0);
  if (!j.contains(key)) return out;
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.size() != n) {
    throw ArgumentError(std::string("term field '") + key + "' must be an array of length n");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int p = arr[i].get<int>();
    if (p < 0) throw ArgumentError("monomial powers must be non-negative");
    out[i] = p;
  }
  return out;
}

std::vector<double> read_coeffs(const json& j, const char* key, std::size_t n) {
  std::vector<double> out(n, 0.0);
  if (!j.contains(key)) return out;
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.size() != n) {
    throw ArgumentError(std::string("trig field '") + key + "' must be an array of length n");
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = arr[i].get<double>();
  return out;
}

Term read_term(const json& j, std::size_t n) {
  if (!j.is_object()) throw ArgumentError("each term must be an object");
  Term t;
  t.coef = j.value("coef", 1.0);
  t.px = read_powers(j, "x", n);
  t.pd = read_powers(j, "xd", n);
  t.alpha.assign(n, 0.0);
  t.beta.assign(n, 0.0);
  for (const char* key : {"sin", "cos"}) {
    if (!j.contains(key)) continue;
    if (t.trig != TrigKind::None) throw ArgumentError("a term may carry only one of sin/cos");
    const auto& arg = j.at(key);
    t.trig = std::string(key) == "sin" ? TrigKind::Sin : TrigKind::Cos;
    t.alpha = read_coeffs(arg, "x", n);
    t.beta = read_coeffs(arg, "xd", n);
    t.shift = arg.value("shift", 0.0);
  }
  return t;
}

}  // namespace

Model model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("model JSON: ") + e.what());
  }
  try {
    Model m;
    m.name = j.value("name", std::string("user"));
    const auto n = j.at("dimension").get<std::size_t>();
    if (n == 0) throw ArgumentError("model dimension must be at least 1");
    m.dim = n;
    m.tau = j.at("tau").get<double>();
    if (j.contains("equilibrium")) m.equilibrium = j.at("equilibrium").get<std::vector<double>>();
    m.odd_symmetric = j.value("odd_symmetric", false);

    const auto& eqs = j.at("equations");
    if (!eqs.is_array() || eqs.size() != n) {
      throw ArgumentError("'equations' must list one term array per component");
    }
    auto terms = std::make_shared<std::vector<std::vector<Term>>>();
    for (const auto& eq : eqs) {
      std::vector<Term> row;
      for (const auto& tj : eq) row.push_back(read_term(tj, n));
      terms->push_back(std::move(row));
    }

    m.rhs = [terms](std::span<const double> x, std::span<const double> xd, std::span<double> dx) {
      for (std::size_t i = 0; i < terms->size(); ++i) {
        double acc = 0.0;
        for (const auto& t : (*terms)[i]) acc += monomial(t, x, xd) * trig_value(t, trig_arg(t, x, xd));
        dx[i] = acc;
      }
    };
    m.jacobian = [terms](std::span<const double> x, std::span<const double> xd,
                         Eigen::Ref<Eigen::MatrixXd> dfdx, Eigen::Ref<Eigen::MatrixXd> dfdxd) {
      dfdx.setZero();
      dfdxd.setZero();
      const std::size_t nn = x.size();
      for (std::size_t i = 0; i < terms->size(); ++i) {
        for (const auto& t : (*terms)[i]) {
          const double arg = trig_arg(t, x, xd);
          const double tv = trig_value(t, arg);
          const double ts = trig_slope(t, arg);
          const double mv = monomial(t, x, xd);
          for (std::size_t k = 0; k < nn; ++k) {
            dfdx(i, k) += dmonomial(t, x, xd, false, k) * tv + mv * ts * t.alpha[k];
            dfdxd(i, k) += dmonomial(t, x, xd, true, k) * tv + mv * ts * t.beta[k];
          }
        }
      }
    };

    if (j.contains("partition")) {
      const auto& pj = j.at("partition");
      m.partition = Partition{pj.value("delayed", std::vector<std::size_t>{}),
                              pj.value("instantaneous", std::vector<std::size_t>{})};
    } else {
      // A component is history-relevant when any term reads its delayed value.
      Partition part;
      for (std::size_t k = 0; k < n; ++k) {
        bool delayed = false;
        for (const auto& row : *terms) {
          for (const auto& t : row) delayed = delayed || t.pd[k] != 0 || t.beta[k] != 0.0;
        }
        (delayed ? part.delayed : part.instantaneous).push_back(k);
      }
      m.partition = part;
    }

    m.parameters = {{"tau", m.tau}};
    m.validate();
    const auto lin = m.linearize();
    m.characteristic = QuasiPolynomial::from_matrices(lin.a0, lin.a1);
    return m;
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("model JSON: ") + e.what());
  }
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace roa
