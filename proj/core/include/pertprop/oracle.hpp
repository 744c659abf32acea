#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "pertprop/operators.hpp"
#include "pertprop/trigpoly.hpp"

namespace pertprop {

/// Raw integrator output. Unitarity defects are reported as found; the
/// oracle never re-unitarizes.
struct PropagatorTrace {
  std::vector<double> times;
  std::vector<Operator> u_values;
  double tolerance = 0.0;
  std::vector<double> unitarity_defects;

  const Operator& final_u() const { return u_values.back(); }
};

/// Solves i dU/dt = H(t) U from U(0) = Identity with an embedded
/// Dormand-Prince 5(4) pair and proportional step control.
/// rel_tol must lie in [1e-13, 1e-6]. Throws on step underflow.
PropagatorTrace integrate_schrodinger(
    const std::function<Operator(double)>& h_of_t, Eigen::Index dim,
    double t_end, double rel_tol);

PropagatorTrace integrate_schrodinger(const TrigPoly& h, double t_end,
                                      double rel_tol);

PropagatorTrace integrate_schrodinger(const Operator& h_const, double t_end,
                                      double rel_tol);

/// Time-ordered series truncation for H(t) = lambda * h_tilde(t):
///   N=1: I - i lambda int_0^t h
///   N=2: ... - lambda^2 int_0^t dt1 int_0^t1 dt2 h(t1) h(t2),
/// with the nested integrals evaluated exactly in the trig-poly algebra.
/// Not unitary: the defect is the point of comparison.
Operator dyson_truncation(const TrigPoly& h_tilde, double lambda, int order,
                          double t);

/// First two exponent terms of the single-exponential expansion of the
/// propagator of h_tilde (as given, no lambda weighting):
///   Omega1 = -i int_0^t h
///   Omega2 = -(1/2) int_0^t dt1 [h(t1), int_0^t1 h].
std::pair<Operator, Operator> magnus_analytic_low(const TrigPoly& h_tilde,
                                                  double t);

/// Least-squares slope of log(error) vs log(lambda) and its r^2.
/// Requires >= 3 points and strictly positive errors.
std::pair<double, double> error_scaling_fit(const std::vector<double>& lambdas,
                                            const std::vector<double>& errors);

}  // namespace pertprop
