#include "pertprop/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pertprop {

double frobenius_norm(const Operator& x) { return x.norm(); }

double hermiticity_defect(const Operator& x) {
  return (x - x.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const Operator& u) {
  return (u.adjoint() * u - Operator::Identity(u.rows(), u.cols())).norm();
}

bool is_hermitian(const Operator& x, double tol_scale) {
  if (x.rows() != x.cols()) return false;
  return hermiticity_defect(x) <= tol_scale * std::max(1.0, x.norm());
}

namespace {

void require_square(const Operator& x, const char* who) {
  if (x.rows() != x.cols())
    throw std::invalid_argument(std::string(who) + ": operator is not square");
}

void require_same_dim(const Operator& x, const Operator& y, const char* who) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch (" +
                                std::to_string(x.rows()) + " vs " +
                                std::to_string(y.rows()) + ")");
}

}  // namespace

Operator commutator(const Operator& x, const Operator& y) {
  require_same_dim(x, y, "commutator");
  return x * y - y * x;
}

Operator commutator_power(const Operator& x, const Operator& y, int k) {
  require_same_dim(x, y, "commutator_power");
  if (k < 0) throw std::invalid_argument("commutator_power: k < 0");
  Operator result = y;
  for (int i = 0; i < k; ++i) result = x * result - result * x;
  return result;
}

Operator hermitian_exponential(const Operator& x, double s) {
  require_square(x, "hermitian_exponential");
  const double defect = hermiticity_defect(x);
  const double tol = 1e-12 * std::max(1.0, x.norm());
  if (defect > tol)
    throw std::invalid_argument(
        "hermitian_exponential: input is not Hermitian (defect " +
        std::to_string(defect) + ", tolerance " + std::to_string(tol) + ")");
  Eigen::SelfAdjointEigenSolver<Operator> solver(x);
  const Eigen::VectorXd& evals = solver.eigenvalues();
  Eigen::VectorXcd phases(evals.size());
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    phases(i) = std::exp(Complex(0.0, -s * evals(i)));
  return solver.eigenvectors() * phases.asDiagonal() *
         solver.eigenvectors().adjoint();
}

Operator adjoint_conjugate(const Operator& u, const Operator& y) {
  require_same_dim(u, y, "adjoint_conjugate");
  return u * y * u.adjoint();
}

Operator Spectrum::reconstruct() const {
  if (clusters.empty()) return Operator();
  Operator sum = Operator::Zero(dim(), dim());
  for (const auto& c : clusters) sum += c.eigenvalue * c.projector;
  return sum;
}

Spectrum spectral_decompose(const Operator& h, double rel_tol) {
  require_square(h, "spectral_decompose");
  if (rel_tol <= 0.0)
    throw std::invalid_argument("spectral_decompose: rel_tol must be > 0");
  if (!is_hermitian(h))
    throw std::invalid_argument("spectral_decompose: input is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Operator> solver(h);
  const Eigen::VectorXd& evals = solver.eigenvalues();
  const Operator& vecs = solver.eigenvectors();
  const Eigen::Index n = evals.size();

  const double range = evals(n - 1) - evals(0);
  const double gap = rel_tol * std::max(1.0, range);

  Spectrum spec;
  spec.cluster_gap = gap;
  Eigen::Index begin = 0;
  while (begin < n) {
    Eigen::Index end = begin + 1;
    while (end < n && evals(end) - evals(end - 1) <= gap) ++end;
    SpectralCluster cluster;
    cluster.multiplicity = static_cast<int>(end - begin);
    cluster.eigenvalue =
        evals.segment(begin, end - begin).mean();
    const auto block = vecs.middleCols(begin, end - begin);
    cluster.projector = block * block.adjoint();
    spec.clusters.push_back(std::move(cluster));
    begin = end;
  }
  return spec;
}

}  // namespace pertprop
