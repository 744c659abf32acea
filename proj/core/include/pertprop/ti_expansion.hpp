#pragma once

#include <optional>
#include <vector>

#include "pertprop/operators.hpp"

namespace pertprop {

/// Eigenprojector block split of an operator against a reference spectrum:
///   diag      = sum_m P_m X P_m                   (commutes with H0)
///   offdiag   = X - diag
///   sylvester = i sum_{j != l} (E_l - E_j)^{-1} P_j X P_l,
/// the unique block-offdiagonal solution of -i [sylvester, H0] = offdiag.
struct BlockSplit {
  Operator diag;
  Operator offdiag;
  Operator sylvester;
  /// Smallest |E_l - E_j| divisor that entered the Sylvester part.
  double min_divisor = 0.0;
};

/// Throws if any divisor |E_l - E_j| falls below 1e3 times the clustering
/// gap of the spectrum: such near-degeneracies must be clustered instead.
BlockSplit block_split(const Operator& x, const Spectrum& spec);

/// G_n(X; Z_1..Z_n) = sum_{m=1}^{n} (i^m / m!)
///                    sum_{k_1+...+k_m = n} ad_{Z_k1} ... ad_{Z_km} X.
/// z_chain holds Z_1..Z_n (z_chain[j] is Z_{j+1}).
Operator g_script(const Operator& x, const std::vector<Operator>& z_chain,
                  int n);

/// The order-n right-hand side of the recursion, without the -i[Z_n, H0]
/// term (which the solver inverts):
///   sum_{m=0}^{n-1} G_{n-m}(H_m; Z_1..Z_{n-m}) + H_n, with Z_n := 0.
/// h_list holds H_0..H_n; z_chain holds Z_1..Z_{n-1}.
Operator g_big(const std::vector<Operator>& h_list,
               const std::vector<Operator>& z_chain, int n);

/// Per-order solution {C_n, Z_n} of the time-independent recursion,
/// together with the data it was derived from.
struct TISolution {
  int order = 0;
  Operator h0;
  std::vector<Operator> h_list;  // H_1..H_N
  Spectrum spectrum;             // of H_0
  std::vector<Operator> c_list;  // C_1..C_N
  std::vector<Operator> z_list;  // Z_1..Z_N
  std::vector<Operator> gauge;   // the chosen block-diagonal parts of Z_n
  bool minimal = true;           // all gauge blocks zero

  /// sum_{n=1}^{N} lambda^n C_n (resp. Z_n).
  Operator c_truncated(double lambda) const;
  Operator z_truncated(double lambda) const;
};

/// Order-by-order: C_n = diag(G_n), Z_n = gauge_n + sylvester(G_n).
/// Default gauge is the minimal solution (all gauge blocks zero). Supplied
/// gauges must be Hermitian and commute with H0.
TISolution solve_ti(const Operator& h0, const std::vector<Operator>& h_list,
                    int order,
                    const std::vector<Operator>* gauge_blocks = nullptr,
                    double cluster_rel_tol = 1e-9);

/// exp(-i Z(lambda)) exp(-i (H0 + C(lambda)) t) exp(i Z(lambda)):
/// exactly unitary at every truncation order.
Operator evolution_ti(const TISolution& sol, double lambda, double t);

/// Same propagator assembled through the reduced rank operators:
/// exp(-i Z) sum_m e^{-i E_m t} P_m exp(-i C t) exp(i Z).
Operator reduced_rank_form(const TISolution& sol, double lambda, double t);

/// || offdiag( e^{i Z(lambda)} H(lambda) e^{-i Z(lambda)} ) ||_F,
/// the block-diagonalization residual; scales as O(lambda^{N+1}).
double block_diag_residual(const TISolution& sol, double lambda);

}  // namespace pertprop
