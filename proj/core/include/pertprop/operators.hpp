#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace pertprop {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;

/// Frobenius norm, the canonical operator distance used throughout.
double frobenius_norm(const Operator& x);

/// max |X - X^dagger| entrywise, the Hermiticity defect.
double hermiticity_defect(const Operator& x);

/// ||U^dagger U - I||_F.
double unitarity_defect(const Operator& u);

bool is_hermitian(const Operator& x, double tol_scale = 1e-12);

/// [X, Y]
Operator commutator(const Operator& x, const Operator& y);

/// ad_X^k Y, with ad_X Y = [X, Y]; k = 0 returns Y.
Operator commutator_power(const Operator& x, const Operator& y, int k);

/// exp(-i s X) for Hermitian X, via spectral decomposition.
/// Throws if X fails the Hermiticity check.
Operator hermitian_exponential(const Operator& x, double s);

/// Ad_U Y = U Y U^dagger (U unitary in all artifact uses).
Operator adjoint_conjugate(const Operator& u, const Operator& y);

/// One eigenvalue cluster of a Hermitian operator: the (possibly
/// degenerate) eigenvalue together with its orthogonal eigenprojector.
struct SpectralCluster {
  double eigenvalue = 0.0;
  Operator projector;
  int multiplicity = 0;
};

struct Spectrum {
  std::vector<SpectralCluster> clusters;
  /// Absolute gap below which neighboring eigenvalues were merged.
  double cluster_gap = 0.0;

  int dim() const {
    return clusters.empty() ? 0 : static_cast<int>(clusters.front().projector.rows());
  }
  /// sum_m E_m P_m
  Operator reconstruct() const;
};

/// Eigendecomposition of a Hermitian operator with degeneracy clustering:
/// eigenvalues closer than rel_tol * max(1, spectral range) are merged
/// into a single cluster with a rank > 1 projector.
Spectrum spectral_decompose(const Operator& h, double rel_tol = 1e-9);

}  // namespace pertprop
