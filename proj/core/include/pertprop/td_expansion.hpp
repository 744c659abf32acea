#pragma once

#include <vector>

#include "pertprop/operators.hpp"
#include "pertprop/trigpoly.hpp"

namespace pertprop {

/// How the splitting between the kick operator Z and the residual generator
/// was fixed. MeanConstants is the distinguished choice (constant C_n equal
/// to the mean of the order-n right-hand side, zero-mean Z_n); FloquetMagnus
/// additionally pins Z_n(0) = 0; Magnus sets Z to zero altogether and keeps
/// all time dependence in C; General covers user-supplied constant gauges.
enum class TDMode { General, MeanConstants, Magnus, FloquetMagnus };

/// Per-order solution of the time-dependent recursion. All entries are trig
/// polynomials over the common declared frequency base of the input.
struct TDSolution {
  int order = 0;
  TDMode mode = TDMode::MeanConstants;
  FrequencyBasisPtr basis;
  Eigen::Index dim = 0;

  std::vector<TrigPoly> h_chain;    // interaction-picture orders H~_1..H~_N
  std::vector<TrigPoly> c_list;     // C_1..C_N (constant polys outside Magnus)
  std::vector<TrigPoly> z_list;     // Z_1..Z_N; empty in Magnus mode
  std::vector<Operator> z0_list;    // Z_n(0); empty in Magnus mode
  std::vector<TrigPoly> frak_list;  // transformed-frame generator orders

  /// sum_n lambda^n Z_n(t) (zero matrix in Magnus mode).
  Operator z_truncated(double lambda, double t) const;
  /// sum_n lambda^n Z_n(0).
  Operator z0_truncated(double lambda) const;
  /// int_0^t sum_n lambda^n C_n.
  Operator c_integral_truncated(double lambda, double t) const;
};

/// Order-n bilinear ad-chain sum: over every composition k_1+...+k_m = n,
///   (i^m / m!) ad_{Z_k1} ... ad_{Z_km} (X - Y / (m+1)).
/// z_chain holds Z_1..Z_n.
TrigPoly g_breve_script(const TrigPoly& x, const TrigPoly& y,
                        const std::vector<TrigPoly>& z_chain, int n);

/// Order-n right-hand side of the time-dependent recursion, independent of
/// Z_n and C_n:
///   sum_{m=1}^{n-1} g_breve_script(H~_m, dZ_m/dt; Z_1..Z_{n-m}) + H~_n.
TrigPoly g_breve(const std::vector<TrigPoly>& h_chain,
                 const std::vector<TrigPoly>& z_chain, int n);

/// R_n(X; Y_1..Y_n) =
///   - sum_{m=1}^{n} ((-i)^m / (m+1)!) sum_{k_1+...+k_m = n}
///     ad_{Y_k1} ... ad_{Y_km} X.
TrigPoly r_script(const TrigPoly& x, const std::vector<TrigPoly>& y_chain,
                  int n);

/// Transformed-frame generator order n from C_1..C_n:
///   frak_n = C_n - sum_{m=1}^{n-1} r_script(C_m; int C_1 .. int C_{n-m}).
TrigPoly c_to_frak(const std::vector<TrigPoly>& c_chain);

/// Inverse recursion: given frak_1..frak_n, returns C_n with
///   C_1 = frak_1,  C_k = sum_m r_script(C_m; int C_1..) + frak_k.
/// Throws on t-polynomial representation overflow.
TrigPoly frak_to_c(const std::vector<TrigPoly>& frak_chain);

/// Distinguished solution: C_n = <G_n> (constant), Z_n the zero-mean
/// primitive of G_n - C_n. Reduces to the minimal time-independent solution
/// when the input is constant.
TDSolution solve_td_mean(const std::vector<TrigPoly>& h_chain, int order);

/// Same recursion with Z_n(t) shifted by a constant Hermitian gauge_n
/// (so Z_n(0) = gauge_n). All-zero gauges give the Floquet-Magnus choice.
/// If c_explicit is non-null each entry must equal the computed mean.
TDSolution solve_td_gauged(const std::vector<TrigPoly>& h_chain, int order,
                           const std::vector<Operator>& gauge,
                           const std::vector<Operator>* c_explicit = nullptr);

/// Z = 0, all time dependence in C: frak_n = H~_n and C_n recovered through
/// frak_to_c. Supported through order 3.
TDSolution magnus_mode(const std::vector<TrigPoly>& h_chain, int order);

/// u0 * exp(-i Z(lambda;t)) * exp(-i int_0^t C(lambda)) * exp(i Z(lambda;0)).
/// Exactly unitary at every truncation order; the trailing factor makes
/// U(lambda; 0) the identity even when Z(lambda; 0) != 0.
Operator evolution_td(const TDSolution& sol, double lambda, double t,
                      const Operator& u0);

/// Residual of the transformed-Hamiltonian identity, order by order in
/// lambda: the order-n part of
///   sum_k (i^k/k!) ad_Z^k H~  -  sum_k (i^k/(k+1)!) ad_Z^k dZ/dt
/// must reproduce frak_n. Returns the max over t_samples of the Frobenius
/// norm of sum_n lambda^n (frak_n - rhs_n); roundoff-sized when the
/// solution is consistent.
double verify_effective_hamiltonian(const TDSolution& sol, double lambda,
                                    const std::vector<double>& t_samples);

}  // namespace pertprop
