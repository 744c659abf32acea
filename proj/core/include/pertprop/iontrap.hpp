#pragma once

#include <functional>

#include "pertprop/operators.hpp"
#include "pertprop/trigpoly.hpp"

namespace pertprop {

/// Laser-driven trapped-ion model family on (Fock space) x (two-level spin),
/// basis |n> x |s> with s = + first (index = 2 n + s, s = 0 for |+>).
struct IonTrapParams {
  double nu = 1.0;       // trap frequency (> 0)
  double epsilon = 0.0;  // internal splitting
  double alpha = 0.0;    // laser frequency
  double lambda = 0.0;   // Rabi frequency over trap frequency
  double eta = 0.0;      // Lamb-Dicke parameter (>= 0)
  double phi = 0.0;      // coupling phase
  int cutoff = 16;       // Fock dimension

  /// Coupling tables; g defined on n >= 0, f on n >= 1 (f(0) is never used:
  /// the deformed ladder operator a_f = a f(n_hat) only reads f(n) for
  /// n >= 1).
  std::function<double(int)> g = [](int) { return 1.0; };
  std::function<double(int)> f = [](int) { return 1.0; };

  double delta() const { return epsilon - alpha; }
  bool resonant() const { return std::abs(delta() - nu) <= 1e-12 * nu; }

  /// Single-sideband configuration: g = 1, f = eta, phase factor -i; the
  /// linear-in-eta truncation of the displacement-operator drive.
  static IonTrapParams linearized(double nu, double lambda, double eta,
                                  int cutoff);
};

/// Truncated matrices of the model, all on the 2*cutoff tensor space.
struct ModelOperators {
  Operator a, a_dag, n_hat;
  Operator a_f, a_f_dag;
  Operator sigma_plus, sigma_minus, sigma_z;
  Operator d_plus, d_minus;  // exp(+- i eta (a + a_dag))
  Operator h0;               // nu n_hat + (epsilon/2) sigma_z
};

/// Kronecker product with the Fock factor on the left (index = 2 n + s).
Operator tensor(const Operator& fock, const Operator& spin);

ModelOperators build_operators(const IonTrapParams& p);

/// Phi_m(eta; n) = sum_l (-eta^2)^l / (l! (l+m)!) [n]_l, with [n]_l the
/// falling factorial; equals n!/(m+n)! L_n^m(eta^2).
double phi_m(double eta, int m, int n);

/// Normal-ordered series for exp(sign * i eta (a + a_dag)) built from the
/// Phi_m functions; independent cross-check path for d_plus / d_minus.
Operator displacement_series(double eta, int sign, int cutoff);

enum class HamiltonianForm { FullDisplacement, Linearized, GeneralizedGF };

struct ModelHamiltonian {
  Operator h0;
  /// Drive over base {alpha}: lambda nu (e^{i alpha t} B x sigma_- + h.c.).
  TrigPoly h_drive;
};

ModelHamiltonian build_hamiltonian(const IonTrapParams& p,
                                   HamiltonianForm form);

/// e^{i H0 t} H_drive(t) e^{-i H0 t} as a trig polynomial: base {nu} on
/// resonance (delta = nu), base {nu, delta} otherwise. Throws if some matrix
/// entry oscillates at a frequency not representable over the base.
TrigPoly interaction_picture(const IonTrapParams& p, const Operator& h0,
                             const TrigPoly& h_drive);

/// Time-independent resonant pair: frak_h0 = nu (n_hat + sigma_z / 2),
/// frak_h1 = nu ((g + e^{i phi}(a_f + a_f_dag)) x sigma_- + h.c.);
/// the drive Hamiltonian in the frame co-rotating at the laser frequency.
struct RotatingFrame {
  Operator frak_h0;
  Operator frak_h1;
};

RotatingFrame rotating_frame(const IonTrapParams& p);

/// Which detuning the rotating wave approximation is resolved at.
enum class RwaResonance { Carrier, RedSideband, BlueSideband };

/// The textbook RWA effective interaction-picture Hamiltonian of the
/// linearized model at the selected resonance.
Operator rwa_effective(const IonTrapParams& p, RwaResonance res);

/// Closed-form first-order reference operators (resonant case):
///   inf_c1 = nu (e^{i phi} a_f_dag x sigma_- + h.c.)
///   inf_z1 = i g x (sigma_- - sigma_+)
///            + (i/2)(e^{i phi} a_f x sigma_- - e^{-i phi} a_f_dag x sigma_+)
///   z1_at(t): same with the oscillating phases restored.
Operator inf_c1(const IonTrapParams& p);
Operator inf_z1(const IonTrapParams& p);
Operator z1_at(const IonTrapParams& p, double t);

/// Closed-form factors of the first-order propagator:
///   exp_c = exp(-i lambda inf_c1 t), a rotation in each {|n,->, |n-1,+>}
///   pair; v1, v2 the two factors of the first-order product splitting of
///   exp(-i lambda Z_1(t)). Frequencies at the truncation boundary are set
///   by the truncated generator (boundary states stay invariant).
struct FirstOrderFactors {
  Operator exp_c;
  Operator v1;
  Operator v2;
};

FirstOrderFactors first_order_closed_forms(const IonTrapParams& p,
                                           double lambda, double t);

/// (1/tau) int_0^tau F = sum_omega A_omega avxp(i omega tau), with
/// avxp(z) = (e^z - 1)/z. Converges to the mean as tau grows.
Operator windowed_average(const TrigPoly& f, double tau);

}  // namespace pertprop
