#include "pertprop/trigpoly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pertprop {

namespace {

bool is_zero_freq(const std::vector<int>& coeffs) {
  return std::all_of(coeffs.begin(), coeffs.end(),
                     [](int c) { return c == 0; });
}

void require_compatible(const TrigPoly& f, const TrigPoly& g,
                        const char* who) {
  if (!f.basis() || !g.basis() || !(*f.basis() == *g.basis()))
    throw std::invalid_argument(std::string(who) +
                                ": base-frequency list mismatch");
  if (f.dim() != g.dim())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

std::vector<int> negated(const std::vector<int>& freq) {
  std::vector<int> out(freq.size());
  for (std::size_t i = 0; i < freq.size(); ++i) out[i] = -freq[i];
  return out;
}

}  // namespace

FrequencyBasis::FrequencyBasis(std::vector<double> base)
    : base_(std::move(base)) {
  for (double b : base_)
    if (!(b > 0.0))
      throw std::invalid_argument("FrequencyBasis: base frequencies must be positive");
}

double FrequencyBasis::value(const std::vector<int>& coeffs) const {
  if (coeffs.size() != base_.size())
    throw std::invalid_argument("FrequencyBasis::value: coefficient size mismatch");
  double v = 0.0;
  for (std::size_t i = 0; i < base_.size(); ++i) v += coeffs[i] * base_[i];
  return v;
}

FrequencyBasisPtr make_basis(std::vector<double> base) {
  return std::make_shared<const FrequencyBasis>(std::move(base));
}

TrigPoly::TrigPoly(FrequencyBasisPtr basis, Eigen::Index dim)
    : basis_(std::move(basis)), dim_(dim) {
  if (!basis_) throw std::invalid_argument("TrigPoly: null basis");
  if (dim_ <= 0) throw std::invalid_argument("TrigPoly: dim must be positive");
}

TrigPoly TrigPoly::constant(FrequencyBasisPtr basis, const Operator& a) {
  TrigPoly p(std::move(basis), a.rows());
  p.add_term(std::vector<int>(p.basis()->size(), 0), a);
  p.prune();
  return p;
}

int TrigPoly::max_tpow() const {
  int p = 0;
  for (const auto& [key, coeff] : terms_) p = std::max(p, key.tpow);
  return p;
}

void TrigPoly::add_term(std::vector<int> freq, const Operator& coeff,
                        int tpow) {
  if (freq.size() != basis_->size())
    throw std::invalid_argument("TrigPoly::add_term: frequency vector size mismatch");
  if (coeff.rows() != dim_ || coeff.cols() != dim_)
    throw std::invalid_argument("TrigPoly::add_term: coefficient dimension mismatch");
  if (tpow < 0) throw std::invalid_argument("TrigPoly::add_term: tpow < 0");
  TermKey key{std::move(freq), tpow};
  auto it = terms_.find(key);
  if (it == terms_.end())
    terms_.emplace(std::move(key), coeff);
  else
    it->second += coeff;
}

double TrigPoly::max_coeff_norm() const {
  double m = 0.0;
  for (const auto& [key, coeff] : terms_) m = std::max(m, coeff.norm());
  return m;
}

void TrigPoly::prune() {
  const double threshold = 1e-14 * max_coeff_norm();
  std::erase_if(terms_, [threshold](const auto& entry) {
    return entry.second.norm() <= threshold;
  });
}

bool TrigPoly::is_hermitian_valued(double tol) const {
  const double scale = std::max(1.0, max_coeff_norm());
  for (const auto& [key, coeff] : terms_) {
    TermKey mirror{negated(key.freq), key.tpow};
    auto it = terms_.find(mirror);
    const Operator partner =
        it == terms_.end() ? Operator::Zero(dim_, dim_) : it->second;
    if ((partner - coeff.adjoint()).norm() > tol * scale) return false;
  }
  return true;
}

TrigPoly combine(Complex a, const TrigPoly& f, Complex b, const TrigPoly& g) {
  require_compatible(f, g, "combine");
  TrigPoly out(f.basis(), f.dim());
  for (const auto& [key, coeff] : f.terms())
    out.add_term(key.freq, a * coeff, key.tpow);
  for (const auto& [key, coeff] : g.terms())
    out.add_term(key.freq, b * coeff, key.tpow);
  out.prune();
  return out;
}

TrigPoly product(const TrigPoly& f, const TrigPoly& g) {
  require_compatible(f, g, "product");
  TrigPoly out(f.basis(), f.dim());
  for (const auto& [kf, cf] : f.terms()) {
    for (const auto& [kg, cg] : g.terms()) {
      std::vector<int> freq(kf.freq.size());
      for (std::size_t i = 0; i < freq.size(); ++i)
        freq[i] = kf.freq[i] + kg.freq[i];
      out.add_term(std::move(freq), cf * cg, kf.tpow + kg.tpow);
    }
  }
  out.prune();
  return out;
}

TrigPoly commutator_poly(const TrigPoly& f, const TrigPoly& g) {
  return combine(1.0, product(f, g), -1.0, product(g, f));
}

Operator evaluate(const TrigPoly& f, double t) {
  Operator out = Operator::Zero(f.dim(), f.dim());
  for (const auto& [key, coeff] : f.terms()) {
    const double omega = f.basis()->value(key.freq);
    Complex factor = std::exp(Complex(0.0, omega * t));
    for (int p = 0; p < key.tpow; ++p) factor *= t;
    out += factor * coeff;
  }
  return out;
}

std::pair<Operator, TrigPoly> mean_and_essential_primitive(const TrigPoly& f) {
  if (!f.pure_trig())
    throw std::invalid_argument(
        "mean_and_essential_primitive: input carries t-powers; the mean is "
        "defined for trigonometric polynomials only");
  Operator mean = Operator::Zero(f.dim(), f.dim());
  TrigPoly esp(f.basis(), f.dim());
  const std::vector<int> zero(f.basis()->size(), 0);
  for (const auto& [key, coeff] : f.terms()) {
    if (is_zero_freq(key.freq)) {
      mean += coeff;
      continue;
    }
    const double omega = f.basis()->value(key.freq);
    const Operator scaled = coeff / Complex(0.0, omega);
    esp.add_term(key.freq, scaled);
    esp.add_term(zero, -scaled);
  }
  esp.prune();
  return {std::move(mean), std::move(esp)};
}

TrigPoly zero_mean_primitive(const TrigPoly& f) {
  auto [mean, esp] = mean_and_essential_primitive(f);
  if (mean.norm() > 1e-12 * std::max(1.0, f.max_coeff_norm()))
    throw std::invalid_argument(
        "zero_mean_primitive: nonzero mean; the primitive would leave the "
        "trigonometric-polynomial class");
  return esp;
}

TrigPoly derivative(const TrigPoly& f) {
  TrigPoly out(f.basis(), f.dim());
  for (const auto& [key, coeff] : f.terms()) {
    const double omega = f.basis()->value(key.freq);
    if (!is_zero_freq(key.freq))
      out.add_term(key.freq, Complex(0.0, omega) * coeff, key.tpow);
    if (key.tpow > 0)
      out.add_term(key.freq, static_cast<double>(key.tpow) * coeff,
                   key.tpow - 1);
  }
  out.prune();
  return out;
}

TrigPoly primitive(const TrigPoly& f, int max_tpow) {
  TrigPoly out(f.basis(), f.dim());
  const std::vector<int> zero(f.basis()->size(), 0);
  for (const auto& [key, coeff] : f.terms()) {
    if (is_zero_freq(key.freq)) {
      // int_0^t s^p ds = t^{p+1} / (p+1)
      if (key.tpow + 1 > max_tpow)
        throw std::invalid_argument(
            "primitive: t-polynomial degree beyond supported degree " +
            std::to_string(max_tpow));
      out.add_term(key.freq, coeff / static_cast<double>(key.tpow + 1),
                   key.tpow + 1);
      continue;
    }
    // int_0^t s^p e^{i omega s} ds, integrated by parts down to p = 0.
    const Complex iw(0.0, f.basis()->value(key.freq));
    Operator scale = coeff / iw;
    for (int p = key.tpow; p >= 1; --p) {
      out.add_term(key.freq, scale, p);
      scale *= -static_cast<double>(p) / iw;
    }
    out.add_term(key.freq, scale, 0);
    out.add_term(zero, -scale, 0);
  }
  out.prune();
  return out;
}

}  // namespace pertprop
