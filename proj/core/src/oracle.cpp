#include "pertprop/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace pertprop {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kB5[7] = {35.0 / 384,      0.0,  500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,  0.0,        7571.0 / 16695,
                           393.0 / 640,     -92097.0 / 339200,
                           187.0 / 2100,    1.0 / 40};

}  // namespace

PropagatorTrace integrate_schrodinger(
    const std::function<Operator(double)>& h_of_t, Eigen::Index dim,
    double t_end, double rel_tol) {
  if (rel_tol < 1e-13 || rel_tol > 1e-6)
    throw std::invalid_argument(
        "integrate_schrodinger: rel_tol outside [1e-13, 1e-6]");
  if (t_end < 0.0)
    throw std::invalid_argument("integrate_schrodinger: t_end must be >= 0");

  const Complex minus_i(0.0, -1.0);
  auto rhs = [&](double t, const Operator& u) -> Operator {
    return minus_i * (h_of_t(t) * u);
  };

  PropagatorTrace trace;
  trace.tolerance = rel_tol;
  Operator u = Operator::Identity(dim, dim);
  double t = 0.0;
  trace.times.push_back(t);
  trace.u_values.push_back(u);
  trace.unitarity_defects.push_back(unitarity_defect(u));
  if (t_end == 0.0) return trace;

  double dt = t_end / 100.0;
  const double dt_min = 1e-14 * t_end;
  Operator k[7];
  while (t < t_end) {
    if (dt < dt_min)
      throw std::runtime_error("integrate_schrodinger: step underflow");
    if (t + dt > t_end) dt = t_end - t;

    k[0] = rhs(t, u);
    for (int s = 1; s < 7; ++s) {
      Operator stage = u;
      for (int j = 0; j < s; ++j)
        if (kA[s][j] != 0.0) stage += (dt * kA[s][j]) * k[j];
      k[s] = rhs(t + kC[s] * dt, stage);
    }
    Operator u5 = u;
    Operator u4 = u;
    for (int s = 0; s < 7; ++s) {
      if (kB5[s] != 0.0) u5 += (dt * kB5[s]) * k[s];
      if (kB4[s] != 0.0) u4 += (dt * kB4[s]) * k[s];
    }
    const double err = (u5 - u4).norm() / std::max(1.0, u5.norm());
    if (err <= rel_tol) {
      t += dt;
      u = std::move(u5);
      trace.times.push_back(t);
      trace.u_values.push_back(u);
      trace.unitarity_defects.push_back(unitarity_defect(u));
    }
    const double shrink =
        err > 0.0 ? 0.9 * std::pow(rel_tol / err, 0.2) : 5.0;
    dt *= std::min(5.0, std::max(0.2, shrink));
  }
  return trace;
}

PropagatorTrace integrate_schrodinger(const TrigPoly& h, double t_end,
                                      double rel_tol) {
  return integrate_schrodinger(
      [&h](double t) { return evaluate(h, t); }, h.dim(), t_end, rel_tol);
}

PropagatorTrace integrate_schrodinger(const Operator& h_const, double t_end,
                                      double rel_tol) {
  return integrate_schrodinger([&h_const](double) { return h_const; },
                               h_const.rows(), t_end, rel_tol);
}

Operator dyson_truncation(const TrigPoly& h_tilde, double lambda, int order,
                          double t) {
  if (order < 1 || order > 2)
    throw std::invalid_argument("dyson_truncation: order must be 1 or 2");

  const int cap = 4;
  const Complex minus_i(0.0, -1.0);
  const TrigPoly p1 = primitive(h_tilde, cap);
  Operator out = Operator::Identity(h_tilde.dim(), h_tilde.dim());
  out += (minus_i * lambda) * evaluate(p1, t);
  if (order == 2) {
    const TrigPoly nested = primitive(product(h_tilde, p1), cap);
    out += (-lambda * lambda) * evaluate(nested, t);
  }
  return out;
}

std::pair<Operator, Operator> magnus_analytic_low(const TrigPoly& h_tilde,
                                                  double t) {
  const int cap = 4;
  const Complex minus_i(0.0, -1.0);
  const TrigPoly p1 = primitive(h_tilde, cap);
  const Operator omega1 = minus_i * evaluate(p1, t);
  const TrigPoly nested = primitive(commutator_poly(h_tilde, p1), cap);
  const Operator omega2 = -0.5 * evaluate(nested, t);
  return {omega1, omega2};
}

std::pair<double, double> error_scaling_fit(const std::vector<double>& lambdas,
                                            const std::vector<double>& errors) {
  const std::size_t n = lambdas.size();
  if (n < 3 || errors.size() != n)
    throw std::invalid_argument("error_scaling_fit: need >= 3 matched points");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lambdas[i] > 0.0) || !(errors[i] > 0.0))
      throw std::invalid_argument(
          "error_scaling_fit: grid and errors must be positive");
    const double x = std::log(lambdas[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double den_x = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / den_x;
  const double den_y = n * syy - sy * sy;
  const double r2 = den_y > 0.0
                        ? (n * sxy - sx * sy) * (n * sxy - sx * sy) /
                              (den_x * den_y)
                        : 1.0;
  return {slope, r2};
}

}  // namespace pertprop
