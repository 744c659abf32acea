#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "pertprop/oracle.hpp"
#include "pertprop/td_expansion.hpp"
#include "test_helpers.hpp"

using namespace pertprop;
using namespace pertprop::testing;

namespace {

const double kNu = 1.0;

FrequencyBasisPtr basis() {
  static FrequencyBasisPtr b = make_basis({kNu});
  return b;
}

// Two-level harmonic drive: e^{i nu t} sigma_+ + e^{-i nu t} sigma_-.
TrigPoly harmonic_h1() {
  TrigPoly h(basis(), 2);
  h.add_term({1}, pauli_plus());
  h.add_term({-1}, pauli_minus());
  return h;
}

TrigPoly second_order_term() {
  TrigPoly h(basis(), 2);
  h.add_term({0}, 0.3 * pauli_z());
  h.add_term({2}, 0.2 * pauli_plus());
  h.add_term({-2}, 0.2 * pauli_minus());
  return h;
}

TrigPoly random_wave(Eigen::Index dim, std::mt19937_64& rng, int max_harmonic) {
  TrigPoly f(basis(), dim);
  for (int k = 1; k <= max_harmonic; ++k) {
    const Operator a = random_operator(dim, rng);
    f.add_term({k}, a);
    f.add_term({-k}, a.adjoint());
  }
  return f;
}

const std::vector<double> kSampleTimes = {0.0, 0.3, 0.9, 1.4, 2.2,
                                          3.3, 4.1, 5.6, 6.9, 8.5};

double max_residual(const TrigPoly& f) {
  double worst = 0.0;
  for (double t : kSampleTimes) worst = std::max(worst, frobenius_norm(evaluate(f, t)));
  return worst;
}

}  // namespace

TEST_CASE("bilinear ad-chain sum") {
  std::mt19937_64 rng(61);
  const TrigPoly x = random_wave(3, rng, 2);
  const TrigPoly y = random_wave(3, rng, 1);
  const TrigPoly z1 = random_wave(3, rng, 1);
  const TrigPoly z2 = random_wave(3, rng, 2);
  const Complex i1(0, 1);

  // n = 1: i ad_{Z1} (X - Y/2).
  const TrigPoly arg1 = combine(1.0, x, -0.5, y);
  const TrigPoly want1 = combine(i1, commutator_poly(z1, arg1), 0.0, TrigPoly(basis(), 3));
  const TrigPoly got1 = g_breve_script(x, y, {z1}, 1);
  CHECK(max_residual(combine(1.0, got1, -1.0, want1)) < 1e-12 * x.max_coeff_norm());

  // n = 2: i ad_{Z2}(X - Y/2) - (1/2) ad_{Z1}^2 (X - Y/3).
  const TrigPoly arg2 = combine(1.0, x, -1.0 / 3.0, y);
  const TrigPoly want2 = combine(
      i1, commutator_poly(z2, arg1), -0.5, commutator_poly(z1, commutator_poly(z1, arg2)));
  const TrigPoly got2 = g_breve_script(x, y, {z1, z2}, 2);
  CHECK(max_residual(combine(1.0, got2, -1.0, want2)) < 1e-11 * x.max_coeff_norm());
}

TEST_CASE("driven recursion right-hand side") {
  const TrigPoly h1 = harmonic_h1();
  const TrigPoly h2 = second_order_term();
  std::mt19937_64 rng(67);
  const TrigPoly z1 = random_wave(2, rng, 2);

  // n = 1 is the bare first order.
  const TrigPoly g1 = g_breve({h1, h2}, {}, 1);
  CHECK(max_residual(combine(1.0, g1, -1.0, h1)) < 1e-13);

  // n = 2: i ad_{Z1}(H~_1 - (1/2) dZ1/dt) + H~_2.
  const TrigPoly arg = combine(1.0, h1, -0.5, derivative(z1));
  const TrigPoly want = combine(Complex(0, 1), commutator_poly(z1, arg), 1.0, h2);
  const TrigPoly got = g_breve({h1, h2}, {z1}, 2);
  CHECK(max_residual(combine(1.0, got, -1.0, want)) < 1e-12);

  // With the zero-mean primitive as Z1 (dZ1/dt = H~_1 here, mean zero), the
  // order-2 right-hand side collapses to (i/2)[Z1, H~_1] + H~_2.
  const TrigPoly zp = zero_mean_primitive(h1);
  const TrigPoly collapsed =
      combine(Complex(0, 0.5), commutator_poly(zp, h1), 1.0, h2);
  const TrigPoly got2 = g_breve({h1, h2}, {zp}, 2);
  CHECK(max_residual(combine(1.0, got2, -1.0, collapsed)) < 1e-12);
}

TEST_CASE("transformed-frame generator recursions") {
  std::mt19937_64 rng(71);
  const TrigPoly x = random_wave(3, rng, 1);
  const TrigPoly y1 = random_wave(3, rng, 1);
  const TrigPoly y2 = random_wave(3, rng, 2);
  const Complex i1(0, 1);

  // R_1(X; Y1) = (i/2)[Y1, X].
  const TrigPoly r1 = r_script(x, {y1}, 1);
  const TrigPoly want1 = combine(0.5 * i1, commutator_poly(y1, x), 0.0, TrigPoly(basis(), 3));
  CHECK(max_residual(combine(1.0, r1, -1.0, want1)) < 1e-12);

  // R_2(X; Y1, Y2) = (i/2)[Y2, X] + (1/6)[Y1, [Y1, X]].
  const TrigPoly r2 = r_script(x, {y1, y2}, 2);
  const TrigPoly want2 = combine(0.5 * i1, commutator_poly(y2, x), 1.0 / 6.0,
                                 commutator_poly(y1, commutator_poly(y1, x)));
  CHECK(max_residual(combine(1.0, r2, -1.0, want2)) < 1e-11);

  SUBCASE("constant-chain round trip") {
    std::vector<TrigPoly> c_chain;
    for (int n = 0; n < 3; ++n)
      c_chain.push_back(TrigPoly::constant(basis(), random_hermitian(3, rng)));

    // frak_2 = C_2 - (i/2)[int C_1, C_1] with int C_1 = t C_1.
    const TrigPoly frak2 = c_to_frak({c_chain[0], c_chain[1]});
    const TrigPoly int_c1 = primitive(c_chain[0], 3);
    const TrigPoly want = combine(1.0, c_chain[1], -0.5 * i1,
                                  commutator_poly(int_c1, c_chain[0]));
    CHECK(max_residual(combine(1.0, frak2, -1.0, want)) < 1e-12);

    // Inverse recursion reproduces the C chain.
    std::vector<TrigPoly> frak_chain;
    std::vector<TrigPoly> c_prefix;
    for (int n = 0; n < 3; ++n) {
      c_prefix.push_back(c_chain[n]);
      frak_chain.push_back(c_to_frak(c_prefix));
    }
    std::vector<TrigPoly> frak_prefix;
    for (int n = 0; n < 3; ++n) {
      frak_prefix.push_back(frak_chain[n]);
      const TrigPoly back = frak_to_c(frak_prefix);
      CHECK(max_residual(combine(1.0, back, -1.0, c_chain[n])) <
            1e-12 * (1.0 + c_chain[n].max_coeff_norm()));
    }
  }
}

TEST_CASE("mean-constants solve") {
  SUBCASE("constant input reduces to the static minimal solution") {
    std::mt19937_64 rng(73);
    const Operator a = random_hermitian(3, rng);
    const TDSolution sol = solve_td_mean({TrigPoly::constant(basis(), a)}, 1);
    CHECK(sol.mode == TDMode::MeanConstants);
    CHECK(frobenius_norm(evaluate(sol.c_list[0], 0.0) - a) < 1e-13);
    CHECK(max_residual(sol.z_list[0]) < 1e-13);
  }

  SUBCASE("harmonic drive, orders 1..3") {
    const TDSolution sol = solve_td_mean({harmonic_h1(), second_order_term(),
                                          TrigPoly(basis(), 2)},
                                         3);
    for (int n = 1; n <= 3; ++n) {
      const TrigPoly& c = sol.c_list[n - 1];
      const TrigPoly& z = sol.z_list[n - 1];
      CHECK(c.is_hermitian_valued(1e-11));
      CHECK(z.is_hermitian_valued(1e-11));
      // C_n is constant, Z_n has zero mean.
      for (double t : kSampleTimes)
        CHECK(frobenius_norm(evaluate(c, t) - evaluate(c, 0.0)) < 1e-12);
      CHECK(frobenius_norm(mean_and_essential_primitive(z).first) < 1e-12);
      // Defining ODE: dZ_n/dt + C_n = G_n pointwise.
      const TrigPoly g = g_breve(sol.h_chain, sol.z_list, n);
      const TrigPoly resid =
          combine(1.0, combine(1.0, derivative(z), 1.0, c), -1.0, g);
      CHECK(max_residual(resid) < 1e-10);
      // Transformed-frame generator equals C_n in this mode.
      const TrigPoly dfrak = combine(1.0, sol.frak_list[n - 1], -1.0, c);
      CHECK(max_residual(dfrak) < 1e-13);
    }
    // First order explicitly: C_1 = <H~_1> = 0, Z_1 the oscillatory part of
    // the primitive (its own mean removed, so Z_1(0) need not vanish).
    CHECK(frobenius_norm(evaluate(sol.c_list[0], 0.0)) < 1e-13);
    const TrigPoly zp = zero_mean_primitive(harmonic_h1());
    const Operator zp_mean = mean_and_essential_primitive(zp).first;
    const TrigPoly want_z1 =
        combine(1.0, zp, -1.0, TrigPoly::constant(basis(), zp_mean));
    const TrigPoly dz = combine(1.0, sol.z_list[0], -1.0, want_z1);
    CHECK(max_residual(dz) < 1e-13);
  }

  SUBCASE("order cap and validation") {
    CHECK_THROWS_AS(solve_td_mean({harmonic_h1()}, 2), std::invalid_argument);
    CHECK_THROWS_AS(solve_td_mean(std::vector<TrigPoly>(5, harmonic_h1()), 5),
                    std::invalid_argument);
  }
}

TEST_CASE("gauged solve") {
  const std::vector<TrigPoly> chain = {harmonic_h1(), second_order_term()};
  const TDSolution mean = solve_td_mean(chain, 2);

  SUBCASE("gauge equal to the mean-mode Z(0) reproduces the mean mode") {
    const TDSolution gauged = solve_td_gauged(chain, 2, mean.z0_list);
    CHECK(gauged.mode == TDMode::General);
    for (int n = 0; n < 2; ++n) {
      for (double t : kSampleTimes) {
        CHECK(frobenius_norm(evaluate(gauged.z_list[n], t) -
                             evaluate(mean.z_list[n], t)) < 1e-12);
        CHECK(frobenius_norm(evaluate(gauged.c_list[n], t) -
                             evaluate(mean.c_list[n], t)) < 1e-12);
      }
    }
  }

  SUBCASE("all-zero gauge pins Z_n(0) = 0") {
    const std::vector<Operator> zeros(2, Operator::Zero(2, 2));
    const TDSolution fm = solve_td_gauged(chain, 2, zeros);
    CHECK(fm.mode == TDMode::FloquetMagnus);
    for (int n = 0; n < 2; ++n) {
      CHECK(frobenius_norm(evaluate(fm.z_list[n], 0.0)) < 1e-13);
      CHECK(frobenius_norm(fm.z0_list[n]) < 1e-13);
      // Same constants as the mean mode; only the kick shifts.
      for (double t : kSampleTimes)
        CHECK(frobenius_norm(evaluate(fm.c_list[n], t) -
                             evaluate(mean.c_list[n], t)) < 1e-12);
      // Periodicity of the kick over the drive period.
      const double period = 2.0 * M_PI / kNu;
      CHECK(frobenius_norm(evaluate(fm.z_list[n], 0.8 + period) -
                           evaluate(fm.z_list[n], 0.8)) < 1e-12);
    }
  }

  SUBCASE("explicit constants are checked against the computed means") {
    std::vector<Operator> wrong = {Operator::Identity(2, 2), Operator::Zero(2, 2)};
    CHECK_THROWS_AS(
        solve_td_gauged(chain, 2, std::vector<Operator>(2, Operator::Zero(2, 2)), &wrong),
        std::invalid_argument);
  }
}

TEST_CASE("single-exponential mode") {
  const TrigPoly h1 = harmonic_h1();

  SUBCASE("first order is the bare drive") {
    const TDSolution sol = magnus_mode({h1}, 1);
    CHECK(sol.mode == TDMode::Magnus);
    CHECK(sol.z_list.empty());
    CHECK(max_residual(combine(1.0, sol.c_list[0], -1.0, h1)) < 1e-13);
  }

  SUBCASE("second order matches the analytic exponent") {
    const TDSolution sol = magnus_mode({h1, TrigPoly(basis(), 2)}, 2);
    const double lambda = 0.1;
    for (double t : {0.9, 3.7, 7.0}) {
      const auto [omega1, omega2] = magnus_analytic_low(h1, t);
      const Operator engine_exponent =
          Complex(0, -1) * sol.c_integral_truncated(lambda, t);
      const Operator analytic = lambda * omega1 + lambda * lambda * omega2;
      CHECK(frobenius_norm(engine_exponent - analytic) < 1e-10);

      // Closed form of the order-2 exponent: -i (nu t - sin nu t)/nu^2 sigma_z.
      const Operator second = Complex(0, -1) *
                              evaluate(primitive(sol.c_list[1], 4), t);
      const Operator want =
          Complex(0, -1) * ((kNu * t - std::sin(kNu * t)) / (kNu * kNu)) * pauli_z();
      CHECK(frobenius_norm(second - want) < 1e-12);

      CHECK(unitarity_defect(evolution_td(sol, lambda, t, Operator::Identity(2, 2))) < 1e-12);
    }
  }

  SUBCASE("order cap") {
    CHECK_THROWS_AS(magnus_mode(std::vector<TrigPoly>(4, h1), 4), std::invalid_argument);
  }
}

TEST_CASE("driven propagator") {
  const std::vector<TrigPoly> chain = {harmonic_h1(), second_order_term()};
  const Operator id = Operator::Identity(2, 2);

  SUBCASE("limits and unitarity") {
    const TDSolution sol = solve_td_mean(chain, 2);
    CHECK(frobenius_norm(evolution_td(sol, 0.3, 0.0, id) - id) < 1e-13);
    CHECK(frobenius_norm(evolution_td(sol, 0.0, 2.5, id) - id) < 1e-13);
    for (double lambda : {0.5, 0.05})
      for (double t : {0.8, 4.0, 15.0})
        CHECK(unitarity_defect(evolution_td(sol, lambda, t, id)) < 1e-12);

    // A nontrivial frame factor multiplies from the left.
    const Operator u0 = hermitian_exponential(pauli_x(), 0.4);
    const Operator with_frame = evolution_td(sol, 0.1, 1.2, u0);
    CHECK(frobenius_norm(with_frame - u0 * evolution_td(sol, 0.1, 1.2, id)) < 1e-13);
  }

  SUBCASE("error against the oracle scales as lambda^{N+1}") {
    const double t = 6.0;
    const std::vector<double> lambdas = {0.04, 0.02, 0.01, 0.005};
    for (int order : {1, 2}) {
      const TDSolution sol = solve_td_mean(chain, order);
      std::vector<double> errors;
      for (double lambda : lambdas) {
        const TrigPoly h_total = combine(lambda, chain[0], lambda * lambda, chain[1]);
        const Operator exact = integrate_schrodinger(h_total, t, 1e-12).final_u();
        errors.push_back(frobenius_norm(evolution_td(sol, lambda, t, id) - exact));
      }
      const auto [slope, r2] = error_scaling_fit(lambdas, errors);
      CHECK(slope >= order + 0.8);
      CHECK(r2 > 0.99);
    }
  }

  SUBCASE("transformed-Hamiltonian identity holds to roundoff") {
    for (int order : {1, 2}) {
      const TDSolution sol = solve_td_mean(chain, order);
      CHECK(verify_effective_hamiltonian(sol, 0.1, kSampleTimes) < 1e-9);
    }
    const TDSolution fm =
        solve_td_gauged(chain, 2, std::vector<Operator>(2, Operator::Zero(2, 2)));
    CHECK(verify_effective_hamiltonian(fm, 0.1, kSampleTimes) < 1e-9);
  }
}
