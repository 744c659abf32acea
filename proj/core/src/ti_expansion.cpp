#include "pertprop/ti_expansion.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pertprop {

namespace {

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

}  // namespace

BlockSplit block_split(const Operator& x, const Spectrum& spec) {
  const auto& clusters = spec.clusters;
  if (clusters.empty() || x.rows() != spec.dim() || x.cols() != spec.dim())
    throw std::invalid_argument("block_split: operator/spectrum dimension mismatch");

  BlockSplit out;
  out.diag = Operator::Zero(x.rows(), x.cols());
  out.sylvester = Operator::Zero(x.rows(), x.cols());
  out.min_divisor = std::numeric_limits<double>::infinity();

  std::vector<Operator> slices(clusters.size());
  for (std::size_t m = 0; m < clusters.size(); ++m) {
    slices[m] = clusters[m].projector * x;
    out.diag += slices[m] * clusters[m].projector;
  }
  const Complex i_unit(0.0, 1.0);
  for (std::size_t j = 0; j < clusters.size(); ++j) {
    for (std::size_t l = 0; l < clusters.size(); ++l) {
      if (j == l) continue;
      const double divisor = clusters[l].eigenvalue - clusters[j].eigenvalue;
      out.min_divisor = std::min(out.min_divisor, std::abs(divisor));
      out.sylvester += (i_unit / divisor) * (slices[j] * clusters[l].projector);
    }
  }
  out.offdiag = x - out.diag;

  if (clusters.size() > 1 && out.min_divisor < 1e3 * spec.cluster_gap)
    throw std::runtime_error(
        "block_split: smallest eigenvalue divisor " +
        std::to_string(out.min_divisor) +
        " is within 1e3x of the clustering gap; tighten the clustering "
        "tolerance so near-degenerate levels share a projector");
  return out;
}

Operator g_script(const Operator& x, const std::vector<Operator>& z_chain,
                  int n) {
  if (n < 1) throw std::invalid_argument("g_script: n must be >= 1");
  if (static_cast<int>(z_chain.size()) < n)
    throw std::invalid_argument("g_script: Z chain shorter than order n");

  Operator acc = Operator::Zero(x.rows(), x.cols());
  // Chains built innermost-first so partial ad products are shared between
  // compositions with a common tail.
  auto recurse = [&](auto&& self, int remaining, const Operator& inner,
                     int m) -> void {
    for (int k = 1; k <= remaining; ++k) {
      Operator next = z_chain[k - 1] * inner - inner * z_chain[k - 1];
      if (remaining - k == 0)
        acc += chain_coefficient(m + 1) * next;
      else
        self(self, remaining - k, next, m + 1);
    }
  };
  recurse(recurse, n, x, 0);
  return acc;
}

Operator g_big(const std::vector<Operator>& h_list,
               const std::vector<Operator>& z_chain, int n) {
  if (n < 1) throw std::invalid_argument("g_big: n must be >= 1");
  if (static_cast<int>(h_list.size()) < n + 1)
    throw std::invalid_argument("g_big: need H_0..H_n");
  if (static_cast<int>(z_chain.size()) < n - 1)
    throw std::invalid_argument("g_big: need Z_1..Z_{n-1}");

  const Operator& h0 = h_list[0];
  // The only chain touching Z_n is the single-part composition in
  // G_n(H_0; ...); setting Z_n = 0 removes exactly the i[Z_n, H0] term
  // that the solver inverts.
  std::vector<Operator> z_ext(z_chain.begin(), z_chain.begin() + (n - 1));
  z_ext.push_back(Operator::Zero(h0.rows(), h0.cols()));

  Operator acc = g_script(h0, z_ext, n);
  for (int m = 1; m <= n - 1; ++m) acc += g_script(h_list[m], z_ext, n - m);
  acc += h_list[n];
  return acc;
}

Operator TISolution::c_truncated(double lambda) const {
  Operator sum = Operator::Zero(h0.rows(), h0.cols());
  double power = 1.0;
  for (const auto& c : c_list) {
    power *= lambda;
    sum += power * c;
  }
  return sum;
}

Operator TISolution::z_truncated(double lambda) const {
  Operator sum = Operator::Zero(h0.rows(), h0.cols());
  double power = 1.0;
  for (const auto& z : z_list) {
    power *= lambda;
    sum += power * z;
  }
  return sum;
}

TISolution solve_ti(const Operator& h0, const std::vector<Operator>& h_list,
                    int order, const std::vector<Operator>* gauge_blocks,
                    double cluster_rel_tol) {
  if (order < 1) throw std::invalid_argument("solve_ti: order must be >= 1");
  if (static_cast<int>(h_list.size()) < order)
    throw std::invalid_argument("solve_ti: need H_1..H_N");
  if (!is_hermitian(h0, 1e-10))
    throw std::invalid_argument("solve_ti: H_0 is not Hermitian");
  for (const auto& h : h_list)
    if (!is_hermitian(h, 1e-10))
      throw std::invalid_argument("solve_ti: perturbation order is not Hermitian");
  if (gauge_blocks && static_cast<int>(gauge_blocks->size()) < order)
    throw std::invalid_argument("solve_ti: gauge list shorter than order");

  TISolution sol;
  sol.order = order;
  sol.h0 = h0;
  sol.h_list.assign(h_list.begin(), h_list.begin() + order);
  sol.spectrum = spectral_decompose(h0, cluster_rel_tol);

  std::vector<Operator> h0_incl;
  h0_incl.push_back(h0);
  h0_incl.insert(h0_incl.end(), sol.h_list.begin(), sol.h_list.end());

  const double h0_norm = h0.norm();
  for (int n = 1; n <= order; ++n) {
    Operator gauge_n = Operator::Zero(h0.rows(), h0.cols());
    if (gauge_blocks) {
      gauge_n = (*gauge_blocks)[n - 1];
      if (!is_hermitian(gauge_n, 1e-10))
        throw std::invalid_argument("solve_ti: gauge block is not Hermitian");
      const double comm = (gauge_n * h0 - h0 * gauge_n).norm();
      if (comm > 1e-10 * std::max(1.0, gauge_n.norm() * h0_norm))
        throw std::invalid_argument(
            "solve_ti: gauge block does not commute with H_0");
      if (gauge_n.norm() > 0.0) sol.minimal = false;
    }
    const Operator g = g_big(h0_incl, sol.z_list, n);
    const BlockSplit split = block_split(g, sol.spectrum);
    sol.c_list.push_back(symmetrized(split.diag));
    sol.z_list.push_back(symmetrized(gauge_n + split.sylvester));
    sol.gauge.push_back(std::move(gauge_n));
  }
  return sol;
}

Operator evolution_ti(const TISolution& sol, double lambda, double t) {
  const Operator z = sol.z_truncated(lambda);
  const Operator generator = symmetrized(sol.h0 + sol.c_truncated(lambda));
  return hermitian_exponential(z, 1.0) * hermitian_exponential(generator, t) *
         hermitian_exponential(z, -1.0);
}

Operator reduced_rank_form(const TISolution& sol, double lambda, double t) {
  const Operator z = sol.z_truncated(lambda);
  const Operator c = symmetrized(sol.c_truncated(lambda));
  Operator phases = Operator::Zero(sol.h0.rows(), sol.h0.cols());
  for (const auto& cluster : sol.spectrum.clusters)
    phases += std::exp(Complex(0.0, -cluster.eigenvalue * t)) * cluster.projector;
  return hermitian_exponential(z, 1.0) * phases * hermitian_exponential(c, t) *
         hermitian_exponential(z, -1.0);
}

double block_diag_residual(const TISolution& sol, double lambda) {
  Operator h = sol.h0;
  double power = 1.0;
  for (const auto& hn : sol.h_list) {
    power *= lambda;
    h += power * hn;
  }
  const Operator w_dag = hermitian_exponential(sol.z_truncated(lambda), -1.0);
  const Operator transformed = w_dag * h * w_dag.adjoint();
  const BlockSplit split = block_split(transformed, sol.spectrum);
  return split.offdiag.norm();
}

}  // namespace pertprop
