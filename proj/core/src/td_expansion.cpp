#include "pertprop/td_expansion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pertprop/detail/compositions.hpp"

namespace pertprop {

namespace {

constexpr int kOrderCap = 4;   // composition blow-up beyond this
constexpr int kMagnusCap = 3;  // t-polynomial degree growth beyond this

Operator symmetrized(const Operator& x) { return 0.5 * (x + x.adjoint()); }

// i^m / m!
Complex chain_coefficient(int m) {
  double fact = 1.0;
  for (int j = 2; j <= m; ++j) fact *= j;
  static const Complex i_unit(0.0, 1.0);
  Complex ipow(1.0, 0.0);
  for (int j = 0; j < m % 4; ++j) ipow *= i_unit;
  return ipow / fact;
}

TrigPoly added(const TrigPoly& f, const TrigPoly& g) {
  return combine(1.0, f, 1.0, g);
}

void validate_chain(const std::vector<TrigPoly>& h_chain, int order,
                    const char* who) {
  if (order < 1)
    throw std::invalid_argument(std::string(who) + ": order must be >= 1");
  if (order > kOrderCap)
    throw std::invalid_argument(std::string(who) + ": order capped at " +
                                std::to_string(kOrderCap));
  if (static_cast<int>(h_chain.size()) < order)
    throw std::invalid_argument(std::string(who) +
                                ": need one trig polynomial per order");
  for (const auto& h : h_chain)
    if (!h.is_hermitian_valued(1e-10))
      throw std::invalid_argument(std::string(who) +
                                  ": input is not Hermitian-valued");
}

// esp with its frequency-zero part dropped; the residue is the zero-mean
// representative of the same primitive.
TrigPoly without_mean(const TrigPoly& f) {
  TrigPoly out(f.basis(), f.dim());
  for (const auto& [key, coeff] : f.terms()) {
    const bool zero_freq = std::all_of(key.freq.begin(), key.freq.end(),
                                       [](int c) { return c == 0; });
    if (!zero_freq) out.add_term(key.freq, coeff, key.tpow);
  }
  return out;
}

TDSolution solve_impl(const std::vector<TrigPoly>& h_chain, int order,
                      const std::vector<Operator>* gauge,
                      const std::vector<Operator>* c_explicit, TDMode mode) {
  validate_chain(h_chain, order, "solve_td");
  if (gauge && static_cast<int>(gauge->size()) < order)
    throw std::invalid_argument("solve_td: gauge list shorter than order");
  if (c_explicit && static_cast<int>(c_explicit->size()) < order)
    throw std::invalid_argument("solve_td: explicit C list shorter than order");

  TDSolution sol;
  sol.order = order;
  sol.mode = mode;
  sol.basis = h_chain.front().basis();
  sol.dim = h_chain.front().dim();
  sol.h_chain.assign(h_chain.begin(), h_chain.begin() + order);

  for (int n = 1; n <= order; ++n) {
    const TrigPoly g = g_breve(sol.h_chain, sol.z_list, n);
    auto [mean, esp] = mean_and_essential_primitive(g);
    mean = symmetrized(mean);
    if (c_explicit) {
      const double mismatch = ((*c_explicit)[n - 1] - mean).norm();
      if (mismatch > 1e-10 * std::max(1.0, mean.norm()))
        throw std::invalid_argument(
            "solve_td: explicit C_n differs from the mean of the order-n "
            "right-hand side; any other constant breaks closure");
    }
    TrigPoly z_n(sol.basis, sol.dim);
    Operator z0;
    if (gauge) {
      const Operator& g_n = (*gauge)[n - 1];
      if (hermiticity_defect(g_n) > 1e-10 * std::max(1.0, g_n.norm()))
        throw std::invalid_argument("solve_td: gauge constant is not Hermitian");
      z_n = added(esp, TrigPoly::constant(sol.basis, g_n));
      z0 = g_n;
    } else {
      z_n = without_mean(esp);
      z0 = evaluate(z_n, 0.0);
    }
    sol.c_list.push_back(TrigPoly::constant(sol.basis, mean));
    sol.z_list.push_back(std::move(z_n));
    sol.z0_list.push_back(std::move(z0));
  }
  // With the oscillating part absorbed into Z, the transformed-frame
  // generator coincides with C order by order.
  sol.frak_list = sol.c_list;
  return sol;
}

}  // namespace

Operator TDSolution::z_truncated(double lambda, double t) const {
  Operator sum = Operator::Zero(dim, dim);
  double power = 1.0;
  for (const auto& z : z_list) {
    power *= lambda;
    sum += power * evaluate(z, t);
  }
  return sum;
}

Operator TDSolution::z0_truncated(double lambda) const {
  Operator sum = Operator::Zero(dim, dim);
  double power = 1.0;
  for (const auto& z0 : z0_list) {
    power *= lambda;
    sum += power * z0;
  }
  return sum;
}

Operator TDSolution::c_integral_truncated(double lambda, double t) const {
  Operator sum = Operator::Zero(dim, dim);
  double power = 1.0;
  for (const auto& c : c_list) {
    power *= lambda;
    sum += power * evaluate(primitive(c, order), t);
  }
  return sum;
}

TrigPoly g_breve_script(const TrigPoly& x, const TrigPoly& y,
                        const std::vector<TrigPoly>& z_chain, int n) {
  if (n < 1) throw std::invalid_argument("g_breve_script: n must be >= 1");
  if (static_cast<int>(z_chain.size()) < n)
    throw std::invalid_argument("g_breve_script: Z chain shorter than order n");

  TrigPoly acc(x.basis(), x.dim());
  for (const auto& comp : detail::integer_compositions(n)) {
    const int m = static_cast<int>(comp.size());
    // argument depends on the part count: X - Y / (m+1)
    TrigPoly term = combine(1.0, x, -1.0 / (m + 1), y);
    for (int idx = m - 1; idx >= 0; --idx)
      term = commutator_poly(z_chain[comp[idx] - 1], term);
    acc = combine(1.0, acc, chain_coefficient(m), term);
  }
  return acc;
}

TrigPoly g_breve(const std::vector<TrigPoly>& h_chain,
                 const std::vector<TrigPoly>& z_chain, int n) {
  if (n < 1) throw std::invalid_argument("g_breve: n must be >= 1");
  if (static_cast<int>(h_chain.size()) < n)
    throw std::invalid_argument("g_breve: need H~_1..H~_n");
  if (static_cast<int>(z_chain.size()) < n - 1)
    throw std::invalid_argument("g_breve: need Z_1..Z_{n-1}");

  TrigPoly acc = h_chain[n - 1];
  for (int m = 1; m <= n - 1; ++m)
    acc = added(acc, g_breve_script(h_chain[m - 1], derivative(z_chain[m - 1]),
                                    z_chain, n - m));
  return acc;
}

TrigPoly r_script(const TrigPoly& x, const std::vector<TrigPoly>& y_chain,
                  int n) {
  if (n < 1) throw std::invalid_argument("r_script: n must be >= 1");
  if (static_cast<int>(y_chain.size()) < n)
    throw std::invalid_argument("r_script: Y chain shorter than order n");

  static const Complex minus_i(0.0, -1.0);
  TrigPoly acc(x.basis(), x.dim());
  for (const auto& comp : detail::integer_compositions(n)) {
    const int m = static_cast<int>(comp.size());
    TrigPoly term = x;
    for (int idx = m - 1; idx >= 0; --idx)
      term = commutator_poly(y_chain[comp[idx] - 1], term);
    // -(-i)^m / (m+1)!
    Complex coeff(1.0, 0.0);
    for (int j = 0; j < m % 4; ++j) coeff *= minus_i;
    double fact = 1.0;
    for (int j = 2; j <= m + 1; ++j) fact *= j;
    acc = combine(1.0, acc, -coeff / fact, term);
  }
  return acc;
}

TrigPoly c_to_frak(const std::vector<TrigPoly>& c_chain) {
  const int n = static_cast<int>(c_chain.size());
  if (n < 1) throw std::invalid_argument("c_to_frak: empty chain");
  if (n == 1) return c_chain.front();

  std::vector<TrigPoly> ints;
  for (int k = 0; k < n - 1; ++k) ints.push_back(primitive(c_chain[k], n));
  TrigPoly frak = c_chain.back();
  for (int m = 1; m <= n - 1; ++m)
    frak = combine(1.0, frak, -1.0, r_script(c_chain[m - 1], ints, n - m));
  return frak;
}

TrigPoly frak_to_c(const std::vector<TrigPoly>& frak_chain) {
  const int n = static_cast<int>(frak_chain.size());
  if (n < 1) throw std::invalid_argument("frak_to_c: empty chain");

  std::vector<TrigPoly> c_chain;
  std::vector<TrigPoly> ints;
  for (int k = 1; k <= n; ++k) {
    TrigPoly c_k = frak_chain[k - 1];
    for (int m = 1; m <= k - 1; ++m)
      c_k = added(c_k, r_script(c_chain[m - 1], ints, k - m));
    if (k < n) ints.push_back(primitive(c_k, n));
    c_chain.push_back(std::move(c_k));
  }
  return c_chain.back();
}

TDSolution solve_td_mean(const std::vector<TrigPoly>& h_chain, int order) {
  return solve_impl(h_chain, order, nullptr, nullptr, TDMode::MeanConstants);
}

TDSolution solve_td_gauged(const std::vector<TrigPoly>& h_chain, int order,
                           const std::vector<Operator>& gauge,
                           const std::vector<Operator>* c_explicit) {
  const bool all_zero =
      std::all_of(gauge.begin(), gauge.end(),
                  [](const Operator& g) { return g.norm() == 0.0; });
  return solve_impl(h_chain, order, &gauge, c_explicit,
                    all_zero ? TDMode::FloquetMagnus : TDMode::General);
}

TDSolution magnus_mode(const std::vector<TrigPoly>& h_chain, int order) {
  validate_chain(h_chain, order, "magnus_mode");
  if (order > kMagnusCap)
    throw std::invalid_argument("magnus_mode: order capped at " +
                                std::to_string(kMagnusCap));

  TDSolution sol;
  sol.order = order;
  sol.mode = TDMode::Magnus;
  sol.basis = h_chain.front().basis();
  sol.dim = h_chain.front().dim();
  sol.h_chain.assign(h_chain.begin(), h_chain.begin() + order);
  sol.frak_list = sol.h_chain;
  sol.c_list.reserve(order);

  std::vector<TrigPoly> ints;
  for (int k = 1; k <= order; ++k) {
    TrigPoly c_k = sol.h_chain[k - 1];
    for (int m = 1; m <= k - 1; ++m)
      c_k = added(c_k, r_script(sol.c_list[m - 1], ints, k - m));
    if (k < order) ints.push_back(primitive(c_k, order));
    sol.c_list.push_back(std::move(c_k));
  }
  return sol;
}

Operator evolution_td(const TDSolution& sol, double lambda, double t,
                      const Operator& u0) {
  if (u0.rows() != sol.dim || u0.cols() != sol.dim)
    throw std::invalid_argument("evolution_td: U0 dimension mismatch");
  const Operator exponent = symmetrized(sol.c_integral_truncated(lambda, t));
  Operator u = u0 * hermitian_exponential(exponent, 1.0);
  if (!sol.z_list.empty()) {
    const Operator z_t = symmetrized(sol.z_truncated(lambda, t));
    const Operator z_0 = symmetrized(sol.z0_truncated(lambda));
    u = u0 * hermitian_exponential(z_t, 1.0) *
        hermitian_exponential(exponent, 1.0) * hermitian_exponential(z_0, -1.0);
  }
  return u;
}

double verify_effective_hamiltonian(const TDSolution& sol, double lambda,
                                    const std::vector<double>& t_samples) {
  TrigPoly weighted(sol.basis, sol.dim);
  std::vector<TrigPoly> zdot;
  for (const auto& z : sol.z_list) zdot.push_back(derivative(z));

  double power = 1.0;
  for (int n = 1; n <= sol.order; ++n) {
    power *= lambda;
    TrigPoly rhs(sol.basis, sol.dim);
    for (const auto& comp : detail::integer_compositions(n)) {
      // last part is the order of the innermost operand, the rest are ad_Z's
      const int m = static_cast<int>(comp.size()) - 1;
      const int j = comp.back();
      if (m > 0 && sol.z_list.empty()) continue;
      TrigPoly term_h = sol.h_chain[j - 1];
      for (int idx = m - 1; idx >= 0; --idx)
        term_h = commutator_poly(sol.z_list[comp[idx] - 1], term_h);
      rhs = combine(1.0, rhs, chain_coefficient(m), term_h);
      if (!sol.z_list.empty()) {
        TrigPoly term_zd = zdot[j - 1];
        for (int idx = m - 1; idx >= 0; --idx)
          term_zd = commutator_poly(sol.z_list[comp[idx] - 1], term_zd);
        rhs = combine(1.0, rhs, -chain_coefficient(m) / double(m + 1), term_zd);
      }
    }
    const TrigPoly resid = combine(1.0, sol.frak_list[n - 1], -1.0, rhs);
    weighted = combine(1.0, weighted, power, resid);
  }

  double worst = 0.0;
  for (double t : t_samples)
    worst = std::max(worst, evaluate(weighted, t).norm());
  return worst;
}

}  // namespace pertprop
