#include "pertprop/iontrap.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace pertprop {

namespace {

constexpr Complex kI(0.0, 1.0);

int idx(int n, int s) { return 2 * n + s; }  // s = 0: |+>, s = 1: |->

Operator spin_sigma_z() {
  Operator s = Operator::Zero(2, 2);
  s(0, 0) = 1.0;
  s(1, 1) = -1.0;
  return s;
}

Operator spin_sigma_plus() {  // |+><-|
  Operator s = Operator::Zero(2, 2);
  s(0, 1) = 1.0;
  return s;
}

Operator spin_sigma_minus() {  // |-><+|
  Operator s = Operator::Zero(2, 2);
  s(1, 0) = 1.0;
  return s;
}

Operator fock_a(int cutoff) {
  Operator a = Operator::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

Operator diag_table(const std::function<double(int)>& table, int cutoff) {
  Operator d = Operator::Zero(cutoff, cutoff);
  for (int n = 0; n < cutoff; ++n) d(n, n) = table(n);
  return d;
}

// drive coupling of e^{i alpha t} x sigma_-, Fock space only
Operator drive_coupling(const IonTrapParams& p, HamiltonianForm form) {
  switch (form) {
    case HamiltonianForm::GeneralizedGF: {
      const Operator a = fock_a(p.cutoff);
      const Operator a_f = a * diag_table(p.f, p.cutoff);
      return diag_table(p.g, p.cutoff) +
             std::exp(kI * p.phi) * (a_f + a_f.adjoint());
    }
    case HamiltonianForm::Linearized: {
      const Operator a = fock_a(p.cutoff);
      return Operator::Identity(p.cutoff, p.cutoff) -
             kI * p.eta * (a + a.adjoint());
    }
    case HamiltonianForm::FullDisplacement: {
      const Operator a = fock_a(p.cutoff);
      // exp(-i eta (a + a_dag))
      return hermitian_exponential(p.eta * (a + a.adjoint()), 1.0);
    }
  }
  throw std::invalid_argument("build_hamiltonian: unknown form");
}

}  // namespace

IonTrapParams IonTrapParams::linearized(double nu, double lambda, double eta,
                                        int cutoff) {
  IonTrapParams p;
  p.nu = nu;
  p.alpha = 0.0;
  p.epsilon = nu;  // delta = epsilon - alpha = nu: blue-sideband resonance
  p.lambda = lambda;
  p.eta = eta;
  p.phi = -M_PI / 2.0;  // e^{i phi} = -i
  p.cutoff = cutoff;
  p.g = [](int) { return 1.0; };
  p.f = [eta](int) { return eta; };
  return p;
}

Operator tensor(const Operator& fock, const Operator& spin) {
  const Eigen::Index nf = fock.rows(), ns = spin.rows();
  Operator out = Operator::Zero(nf * ns, nf * ns);
  for (Eigen::Index i = 0; i < nf; ++i)
    for (Eigen::Index j = 0; j < nf; ++j)
      if (fock(i, j) != Complex(0.0, 0.0))
        out.block(i * ns, j * ns, ns, ns) = fock(i, j) * spin;
  return out;
}

ModelOperators build_operators(const IonTrapParams& p) {
  if (p.cutoff < 4)
    throw std::invalid_argument("build_operators: cutoff must be >= 4");
  if (!(p.nu > 0.0))
    throw std::invalid_argument("build_operators: nu must be positive");

  const int nf = p.cutoff;
  const Operator a = fock_a(nf);
  const Operator id_f = Operator::Identity(nf, nf);
  const Operator id_s = Operator::Identity(2, 2);
  const Operator a_f = a * diag_table(p.f, nf);
  const Operator x = p.eta * (a + a.adjoint());

  ModelOperators m;
  m.a = tensor(a, id_s);
  m.a_dag = m.a.adjoint();
  m.n_hat = tensor(a.adjoint() * a, id_s);
  m.a_f = tensor(a_f, id_s);
  m.a_f_dag = m.a_f.adjoint();
  m.sigma_plus = tensor(id_f, spin_sigma_plus());
  m.sigma_minus = tensor(id_f, spin_sigma_minus());
  m.sigma_z = tensor(id_f, spin_sigma_z());
  m.d_plus = tensor(hermitian_exponential(x, -1.0), id_s);
  m.d_minus = m.d_plus.adjoint();
  m.h0 = p.nu * m.n_hat + 0.5 * p.epsilon * m.sigma_z;
  return m;
}

double phi_m(double eta, int m, int n) {
  if (m < 0 || n < 0) throw std::invalid_argument("phi_m: negative index");
  const double z = -eta * eta;
  double sum = 0.0;
  double factor = 1.0;  // z^l [n]_l / l!
  double fact_lm = 1.0; // (l+m)!
  for (int j = 2; j <= m; ++j) fact_lm *= j;
  for (int l = 0; l <= n; ++l) {
    if (l > 0) {
      factor *= z * (n - l + 1) / l;
      fact_lm *= l + m;
    }
    sum += factor / fact_lm;
  }
  return sum;
}

Operator displacement_series(double eta, int sign, int cutoff) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("displacement_series: sign must be +-1");
  const Operator a = fock_a(cutoff);
  auto phi_diag = [&](int m) {
    Operator d = Operator::Zero(cutoff, cutoff);
    for (int n = 0; n < cutoff; ++n) d(n, n) = phi_m(eta, m, n);
    return d;
  };
  Operator sum = phi_diag(0);
  Operator a_pow = Operator::Identity(cutoff, cutoff);
  Complex coeff(1.0, 0.0);
  for (int m = 1; m < cutoff; ++m) {
    a_pow = a_pow * a;
    coeff *= Complex(0.0, sign * eta);
    const Operator phi = phi_diag(m);
    sum += coeff * (phi * a_pow + a_pow.adjoint() * phi);
  }
  return std::exp(-0.5 * eta * eta) * sum;
}

ModelHamiltonian build_hamiltonian(const IonTrapParams& p,
                                   HamiltonianForm form) {
  if (p.cutoff < 4)
    throw std::invalid_argument("build_hamiltonian: cutoff must be >= 4");
  const Operator coupling = drive_coupling(p, form);
  const Operator term = p.lambda * p.nu * tensor(coupling, spin_sigma_minus());

  ModelHamiltonian h;
  h.h0 = build_operators(p).h0;
  if (p.alpha > 0.0) {
    TrigPoly drive(make_basis({p.alpha}), 2 * p.cutoff);
    drive.add_term({1}, term);
    drive.add_term({-1}, term.adjoint());
    drive.prune();
    h.h_drive = std::move(drive);
  } else {
    // static drive (alpha = 0): constant polynomial over the trap base
    TrigPoly drive(make_basis({p.nu}), 2 * p.cutoff);
    drive.add_term({0}, term + term.adjoint());
    drive.prune();
    h.h_drive = std::move(drive);
  }
  return h;
}

TrigPoly interaction_picture(const IonTrapParams& p, const Operator& h0,
                             const TrigPoly& h_drive) {
  const int dim = static_cast<int>(h0.rows());
  if (h_drive.dim() != dim)
    throw std::invalid_argument("interaction_picture: dimension mismatch");
  const double delta = p.delta();
  const bool carrier = std::abs(delta) <= 1e-12 * p.nu;

  if (!p.resonant() && !carrier) {
    const double m_near = std::round(delta / p.nu);
    if (std::abs(delta - m_near * p.nu) <= 1e-9 * p.nu)
      throw std::invalid_argument(
          "interaction_picture: detuning collides with a multiple of the trap "
          "frequency; only the exactly resonant cases are representable");
  }

  const bool single_base = p.resonant() || carrier;
  FrequencyBasisPtr basis = single_base
                                ? make_basis({p.nu})
                                : make_basis({p.nu, std::abs(delta)});
  TrigPoly out(basis, dim);

  for (const auto& [key, coeff] : h_drive.terms()) {
    if (key.tpow != 0)
      throw std::invalid_argument("interaction_picture: drive must be pure trig");
    const int d = p.alpha > 0.0 ? key.freq.at(0) : 0;
    // bucket the entries of this term by (Fock shift, spin flip)
    std::map<std::pair<int, int>, Operator> buckets;
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        if (coeff(i, j) == Complex(0.0, 0.0)) continue;
        const int k = i / 2 - j / 2;
        // s = 0 is |+> (sigma = +1), s = 1 is |-> (sigma = -1)
        const int flip = ((i % 2 == 0) ? 1 : -1) - ((j % 2 == 0) ? 1 : -1);
        const int dsig = flip / 2;
        // With a harmonic drive the laser phase must be cancelled by the
        // spin flip; a static drive (alpha = 0) has no phase to cancel.
        if (p.alpha > 0.0 && dsig + d != 0)
          throw std::invalid_argument(
              "interaction_picture: entry oscillates at a frequency outside "
              "the declared base (spin flip does not cancel the drive)");
        auto& slot = buckets[{k, dsig}];
        if (slot.size() == 0) slot = Operator::Zero(dim, dim);
        slot(i, j) = coeff(i, j);
      }
    }
    for (auto& [shift, block] : buckets) {
      const auto& [k, dsig] = shift;
      if (p.resonant())
        out.add_term({k + dsig}, block);
      else if (carrier)
        out.add_term({k}, block);
      else
        out.add_term({k, delta > 0.0 ? dsig : -dsig}, block);
    }
  }
  out.prune();
  return out;
}

RotatingFrame rotating_frame(const IonTrapParams& p) {
  if (!p.resonant())
    throw std::invalid_argument(
        "rotating_frame: requires the sideband resonance delta = nu");
  const ModelOperators m = build_operators(p);
  const Operator coupling =
      p.nu * tensor(drive_coupling(p, HamiltonianForm::GeneralizedGF),
                    spin_sigma_minus());
  RotatingFrame frame;
  frame.frak_h0 = p.nu * (m.n_hat + 0.5 * tensor(Operator::Identity(p.cutoff, p.cutoff),
                                                 spin_sigma_z()));
  frame.frak_h1 = coupling + coupling.adjoint();
  return frame;
}

Operator rwa_effective(const IonTrapParams& p, RwaResonance res) {
  const int nf = p.cutoff;
  const Operator a = fock_a(nf);
  const Operator id_f = Operator::Identity(nf, nf);
  const double s = p.lambda * p.nu;
  switch (res) {
    case RwaResonance::Carrier:
      return s * tensor(id_f, spin_sigma_minus() + spin_sigma_plus());
    case RwaResonance::RedSideband:
      return kI * s * p.eta *
             (tensor(a.adjoint(), spin_sigma_plus()) -
              tensor(a, spin_sigma_minus()));
    case RwaResonance::BlueSideband:
      return kI * s * p.eta *
             (tensor(a, spin_sigma_plus()) -
              tensor(a.adjoint(), spin_sigma_minus()));
  }
  throw std::invalid_argument("rwa_effective: unknown resonance tag");
}

Operator inf_c1(const IonTrapParams& p) {
  const ModelOperators m = build_operators(p);
  const Operator term = p.nu * std::exp(kI * p.phi) * m.a_f_dag * m.sigma_minus;
  return term + term.adjoint();
}

Operator inf_z1(const IonTrapParams& p) {
  const ModelOperators m = build_operators(p);
  const Operator g_part =
      kI * tensor(diag_table(p.g, p.cutoff), spin_sigma_minus() - spin_sigma_plus());
  const Operator sideband =
      (kI / 2.0) * std::exp(kI * p.phi) * m.a_f * m.sigma_minus;
  return g_part + sideband + sideband.adjoint();
}

Operator z1_at(const IonTrapParams& p, double t) {
  const ModelOperators m = build_operators(p);
  const Complex osc = std::exp(-kI * p.nu * t);
  const Operator g_part = kI * tensor(diag_table(p.g, p.cutoff),
                                      Operator(osc * spin_sigma_minus() -
                                               std::conj(osc) * spin_sigma_plus()));
  const Operator sideband = (kI / 2.0) *
                            std::exp(-kI * (2.0 * p.nu * t - p.phi)) * m.a_f *
                            m.sigma_minus;
  return g_part + sideband + sideband.adjoint();
}

FirstOrderFactors first_order_closed_forms(const IonTrapParams& p,
                                           double lambda, double t) {
  if (!p.resonant())
    throw std::invalid_argument(
        "first_order_closed_forms: requires the sideband resonance delta = nu");
  const int nf = p.cutoff;
  auto f_script = [&](int n) { return p.f(n) * std::sqrt(double(n)); };

  FirstOrderFactors out;
  out.exp_c = Operator::Zero(2 * nf, 2 * nf);
  out.v1 = Operator::Zero(2 * nf, 2 * nf);
  out.v2 = Operator::Zero(2 * nf, 2 * nf);

  // exp(-i lambda inf_c1 t): rotations in the pairs {|n,->, |n-1,+>}; the
  // states |0,-> and |cutoff-1,+> are invariant under the truncated
  // generator.
  out.exp_c(idx(0, 1), idx(0, 1)) = 1.0;
  out.exp_c(idx(nf - 1, 0), idx(nf - 1, 0)) = 1.0;
  for (int n = 1; n < nf; ++n) {
    const double theta = lambda * p.nu * f_script(n) * t;
    const int lo = idx(n, 1), hi = idx(n - 1, 0);
    out.exp_c(lo, lo) = std::cos(theta);
    out.exp_c(hi, hi) = std::cos(theta);
    out.exp_c(lo, hi) = -kI * std::exp(kI * p.phi) * std::sin(theta);
    out.exp_c(hi, lo) = -kI * std::exp(-kI * p.phi) * std::sin(theta);
  }

  // V1 = exp(lambda g x (e^{-i nu t} sigma_- - e^{i nu t} sigma_+))
  for (int n = 0; n < nf; ++n) {
    const double c = std::cos(lambda * p.g(n)), s = std::sin(lambda * p.g(n));
    out.v1(idx(n, 0), idx(n, 0)) = c;
    out.v1(idx(n, 1), idx(n, 1)) = c;
    out.v1(idx(n, 1), idx(n, 0)) = std::exp(-kI * p.nu * t) * s;
    out.v1(idx(n, 0), idx(n, 1)) = -std::exp(kI * p.nu * t) * s;
  }

  // V2: rotations in the pairs {|n,->, |n+1,+>}; |0,+> and |cutoff-1,->
  // are invariant under the truncated generator.
  const Complex phase = std::exp(kI * (2.0 * p.nu * t - p.phi));
  out.v2(idx(0, 0), idx(0, 0)) = 1.0;
  out.v2(idx(nf - 1, 1), idx(nf - 1, 1)) = 1.0;
  for (int n = 0; n + 1 < nf; ++n) {
    const double chi = 0.5 * lambda * f_script(n + 1);
    const int lo = idx(n, 1), hi = idx(n + 1, 0);
    out.v2(lo, lo) = std::cos(chi);
    out.v2(hi, hi) = std::cos(chi);
    out.v2(lo, hi) = std::conj(phase) * std::sin(chi);
    out.v2(hi, lo) = -phase * std::sin(chi);
  }
  return out;
}

Operator windowed_average(const TrigPoly& f, double tau) {
  if (!(tau > 0.0))
    throw std::invalid_argument("windowed_average: tau must be positive");
  if (!f.pure_trig())
    throw std::invalid_argument("windowed_average: input must be pure trig");
  auto avxp = [](Complex z) {
    return std::abs(z) < 1e-300 ? Complex(1.0, 0.0) : (std::exp(z) - 1.0) / z;
  };
  Operator out = Operator::Zero(f.dim(), f.dim());
  for (const auto& [key, coeff] : f.terms())
    out += avxp(kI * f.basis()->value(key.freq) * tau) * coeff;
  return out;
}

}  // namespace pertprop
