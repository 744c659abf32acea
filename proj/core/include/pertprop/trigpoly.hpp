#pragma once

#include <compare>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "pertprop/operators.hpp"

namespace pertprop {

/// Declared-once list of positive base frequencies (rad/time). Frequencies of
/// individual terms are integer combinations of these, so frequency matching
/// is exact and the omega = 0 (mean) term is unambiguous. The caller is
/// responsible for declaring rationally independent bases.
class FrequencyBasis {
 public:
  explicit FrequencyBasis(std::vector<double> base);

  std::size_t size() const { return base_.size(); }
  const std::vector<double>& base() const { return base_; }
  double value(const std::vector<int>& coeffs) const;

  friend bool operator==(const FrequencyBasis& a, const FrequencyBasis& b) {
    return a.base_ == b.base_;
  }

 private:
  std::vector<double> base_;
};

using FrequencyBasisPtr = std::shared_ptr<const FrequencyBasis>;

FrequencyBasisPtr make_basis(std::vector<double> base);

/// A term is keyed by its integer frequency vector plus a small power of t:
/// coefficient A contributes A t^p e^{i omega t}. Pure trigonometric
/// polynomials have tpow = 0 everywhere; the t-powers appear only in the
/// Magnus / Dyson integrals of nonzero-mean terms.
struct TermKey {
  std::vector<int> freq;
  int tpow = 0;

  auto operator<=>(const TermKey&) const = default;
};

class TrigPoly {
 public:
  using TermMap = std::map<TermKey, Operator>;

  TrigPoly() = default;
  TrigPoly(FrequencyBasisPtr basis, Eigen::Index dim);

  /// Constant (frequency-zero) polynomial.
  static TrigPoly constant(FrequencyBasisPtr basis, const Operator& a);

  const FrequencyBasisPtr& basis() const { return basis_; }
  Eigen::Index dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  int max_tpow() const;
  bool pure_trig() const { return max_tpow() == 0; }

  void add_term(std::vector<int> freq, const Operator& coeff, int tpow = 0);

  /// Drops coefficients with norm <= 1e-14 * (largest coefficient norm).
  void prune();

  double max_coeff_norm() const;

  /// A_{-omega, p} == A_{omega, p}^dagger for every term, within tol.
  bool is_hermitian_valued(double tol = 1e-12) const;

 private:
  FrequencyBasisPtr basis_;
  Eigen::Index dim_ = 0;
  TermMap terms_;
};

/// a F + b G.
TrigPoly combine(Complex a, const TrigPoly& f, Complex b, const TrigPoly& g);

/// Pointwise operator product, by frequency convolution.
TrigPoly product(const TrigPoly& f, const TrigPoly& g);

/// product(F, G) - product(G, F).
TrigPoly commutator_poly(const TrigPoly& f, const TrigPoly& g);

/// sum_terms A t^p e^{i omega t}.
Operator evaluate(const TrigPoly& f, double t);

/// Mean value (the omega = 0 coefficient) and the essential primitive
/// esp F = int_0^t (F - <F>). Requires a pure trigonometric polynomial.
std::pair<Operator, TrigPoly> mean_and_essential_primitive(const TrigPoly& f);

/// int_0^t F for a zero-mean pure trigonometric polynomial; a nonzero mean
/// would leave the trig-polynomial class, and is rejected.
TrigPoly zero_mean_primitive(const TrigPoly& f);

/// d/dt F.
TrigPoly derivative(const TrigPoly& f);

/// Full antiderivative int_0^t F in the t-power-extended algebra. Nonzero
/// mean components raise the t-degree by one; max_tpow caps the supported
/// degree (representation overflow otherwise).
TrigPoly primitive(const TrigPoly& f, int max_tpow);

}  // namespace pertprop
