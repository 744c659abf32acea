#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "pertprop/trigpoly.hpp"
#include "test_helpers.hpp"

using namespace pertprop;
using namespace pertprop::testing;

namespace {

const double kNu = 1.3;

TrigPoly hermitian_wave(const FrequencyBasisPtr& basis, const Operator& a) {
  TrigPoly f(basis, a.rows());
  f.add_term({1}, a);
  f.add_term({-1}, a.adjoint());
  return f;
}

}  // namespace

TEST_CASE("frequency basis") {
  const auto basis = make_basis({kNu, 0.4});
  CHECK(basis->size() == 2);
  CHECK(basis->value({1, 0}) == doctest::Approx(kNu));
  CHECK(basis->value({2, -1}) == doctest::Approx(2 * kNu - 0.4));
  CHECK_THROWS_AS(make_basis({1.0, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(basis->value({1}), std::invalid_argument);
}

TEST_CASE("term bookkeeping, combine, prune") {
  const auto basis = make_basis({kNu});
  std::mt19937_64 rng(3);
  const Operator a = random_operator(3, rng);
  const Operator b = random_operator(3, rng);
  const Operator c = random_operator(3, rng);

  TrigPoly f(basis, 3);
  f.add_term({1}, a);
  TrigPoly g(basis, 3);
  g.add_term({1}, b);
  g.add_term({-1}, c);

  const TrigPoly sum = combine(2.0, f, 1.0, g);
  REQUIRE(sum.terms().size() == 2);
  CHECK(frobenius_norm(sum.terms().at({{1}, 0}) - (2.0 * a + b)) < 1e-14);
  CHECK(frobenius_norm(sum.terms().at({{-1}, 0}) - c) < 1e-14);

  // Adding to an existing key accumulates; cancellation leaves no term
  // behind after pruning.
  TrigPoly cancel(basis, 3);
  cancel.add_term({1}, a);
  cancel.add_term({1}, -a);
  cancel.prune();
  CHECK(cancel.empty());

  TrigPoly tiny(basis, 3);
  tiny.add_term({0}, a);
  tiny.add_term({1}, 1e-16 * b);
  tiny.prune();
  CHECK(tiny.terms().size() == 1);

  const TrigPoly other_basis(make_basis({2.0}), 3);
  CHECK_THROWS_AS(combine(1.0, f, 1.0, other_basis), std::invalid_argument);
}

TEST_CASE("product and commutator convolve frequencies") {
  const auto basis = make_basis({kNu});
  TrigPoly f(basis, 2);
  f.add_term({1}, pauli_plus());
  TrigPoly g(basis, 2);
  g.add_term({-1}, pauli_minus());

  // e^{i nu t} sigma_+ * e^{-i nu t} sigma_- is the static |+><+| projector.
  const TrigPoly prod = product(f, g);
  REQUIRE(prod.terms().size() == 1);
  CHECK(frobenius_norm(prod.terms().at({{0}, 0}) - pauli_plus() * pauli_minus()) < 1e-14);

  const TrigPoly comm = commutator_poly(f, g);
  REQUIRE(comm.terms().size() == 1);
  CHECK(frobenius_norm(comm.terms().at({{0}, 0}) - pauli_z()) < 1e-14);

  // t-powers add under multiplication.
  TrigPoly tf(basis, 2);
  tf.add_term({1}, pauli_x(), 1);
  const TrigPoly tprod = product(tf, g);
  REQUIRE(tprod.terms().size() == 1);
  CHECK(tprod.terms().begin()->first.tpow == 1);
  CHECK(tprod.max_tpow() == 1);
}

TEST_CASE("evaluation is pointwise faithful") {
  const auto basis = make_basis({kNu});
  std::mt19937_64 rng(5);
  TrigPoly f(basis, 4);
  TrigPoly g(basis, 4);
  for (int k = -2; k <= 2; ++k) {
    f.add_term({k}, random_operator(4, rng));
    g.add_term({k}, random_operator(4, rng));
  }
  const TrigPoly fg = product(f, g);
  const TrigPoly fpg = combine(Complex(0.3, 0), f, Complex(0, 1.0), g);

  std::uniform_real_distribution<double> uni(0.0, 20.0);
  const double scale = f.max_coeff_norm() * g.max_coeff_norm();
  for (int i = 0; i < 10; ++i) {
    const double t = uni(rng);
    CHECK(frobenius_norm(evaluate(fg, t) - evaluate(f, t) * evaluate(g, t)) < 1e-11 * scale);
    CHECK(frobenius_norm(evaluate(fpg, t) -
                         (0.3 * evaluate(f, t) + Complex(0, 1) * evaluate(g, t))) <
          1e-12 * scale);
  }

  // Period 2 pi / nu is exact for pure trig content over a single base.
  const double period = 2.0 * M_PI / kNu;
  CHECK(frobenius_norm(evaluate(f, 0.4 + period) - evaluate(f, 0.4)) <
        1e-11 * f.max_coeff_norm());
}

TEST_CASE("mean and essential primitive") {
  const auto basis = make_basis({kNu});
  std::mt19937_64 rng(9);
  const Operator a = random_operator(3, rng);
  const Operator m = random_hermitian(3, rng);

  SUBCASE("constant input") {
    const auto [mean, esp] = mean_and_essential_primitive(TrigPoly::constant(basis, m));
    CHECK(frobenius_norm(mean - m) < 1e-14);
    CHECK(esp.empty());
  }

  SUBCASE("single harmonic") {
    TrigPoly f(basis, 3);
    f.add_term({1}, a);
    const auto [mean, esp] = mean_and_essential_primitive(f);
    CHECK(frobenius_norm(mean) < 1e-14);
    // int_0^t A e^{i nu s} ds = (A / (i nu)) (e^{i nu t} - 1).
    REQUIRE(esp.terms().size() == 2);
    const Operator over_inu = a / Complex(0, kNu);
    CHECK(frobenius_norm(esp.terms().at({{1}, 0}) - over_inu) < 1e-14);
    CHECK(frobenius_norm(esp.terms().at({{0}, 0}) + over_inu) < 1e-14);
    CHECK(frobenius_norm(evaluate(esp, 0.0)) < 1e-14);
  }

  SUBCASE("mean is linear") {
    TrigPoly f(basis, 3);
    f.add_term({0}, m);
    f.add_term({2}, a);
    TrigPoly g = TrigPoly::constant(basis, Operator(a + a.adjoint()));
    const Operator mf = mean_and_essential_primitive(f).first;
    const Operator mg = mean_and_essential_primitive(g).first;
    const Operator msum = mean_and_essential_primitive(combine(2.0, f, -1.0, g)).first;
    CHECK(frobenius_norm(msum - (2.0 * mf - mg)) < 1e-14);
  }

  SUBCASE("rejects t-power content") {
    TrigPoly f(basis, 3);
    f.add_term({1}, a, 1);
    CHECK_THROWS_AS(mean_and_essential_primitive(f), std::invalid_argument);
  }
}

TEST_CASE("zero mean primitive") {
  const auto basis = make_basis({kNu});
  std::mt19937_64 rng(15);
  const Operator a = random_operator(3, rng);

  const TrigPoly f = hermitian_wave(basis, a);
  const TrigPoly prim = zero_mean_primitive(f);
  CHECK(frobenius_norm(evaluate(prim, 0.0)) < 1e-13);
  // Fundamental theorem, pointwise.
  const TrigPoly back = derivative(prim);
  for (double t : {0.3, 1.7, 6.1}) {
    CHECK(frobenius_norm(evaluate(back, t) - evaluate(f, t)) < 1e-12 * f.max_coeff_norm());
  }

  CHECK_THROWS_AS(zero_mean_primitive(TrigPoly::constant(basis, a)), std::invalid_argument);
}

TEST_CASE("derivative handles t-powers") {
  const auto basis = make_basis({kNu});
  std::mt19937_64 rng(21);
  const Operator a = random_operator(2, rng);

  TrigPoly f(basis, 2);
  f.add_term({1}, a);
  const TrigPoly df = derivative(f);
  REQUIRE(df.terms().size() == 1);
  CHECK(frobenius_norm(df.terms().at({{1}, 0}) - Complex(0, kNu) * a) < 1e-14);

  // d/dt (t e^{i nu t} A) = e^{i nu t} A + i nu t e^{i nu t} A.
  TrigPoly tf(basis, 2);
  tf.add_term({1}, a, 1);
  const TrigPoly dtf = derivative(tf);
  const double h = 1e-6;
  for (double t : {0.5, 2.2}) {
    const Operator fd = (evaluate(tf, t + h) - evaluate(tf, t - h)) / (2.0 * h);
    CHECK(frobenius_norm(evaluate(dtf, t) - fd) < 1e-7);
  }
}

TEST_CASE("full primitive raises the t-degree for the mean part") {
  const auto basis = make_basis({kNu});
  std::mt19937_64 rng(27);
  const Operator m = random_hermitian(3, rng);
  const Operator a = random_operator(3, rng);

  TrigPoly f(basis, 3);
  f.add_term({0}, m);
  f.add_term({1}, a);
  f.add_term({-1}, a.adjoint());
  const TrigPoly prim = primitive(f, 4);
  CHECK(prim.max_tpow() == 1);
  CHECK(frobenius_norm(evaluate(prim, 0.0)) < 1e-13);

  const TrigPoly back = derivative(prim);
  for (double t : {0.2, 1.1, 4.4}) {
    CHECK(frobenius_norm(evaluate(back, t) - evaluate(f, t)) < 1e-12 * f.max_coeff_norm());
    // Direct value check against m t + oscillatory part.
    const Operator osc = (a / Complex(0, kNu)) * (std::exp(Complex(0, kNu * t)) - 1.0) +
                         (a.adjoint() / Complex(0, -kNu)) * (std::exp(Complex(0, -kNu * t)) - 1.0);
    CHECK(frobenius_norm(evaluate(prim, t) - (t * m + osc)) < 1e-12 * f.max_coeff_norm());
  }

  TrigPoly high(basis, 3);
  high.add_term({0}, m, 4);
  CHECK_THROWS_AS(primitive(high, 4), std::invalid_argument);
}

TEST_CASE("hermitian-valued closure") {
  const auto basis = make_basis({kNu});
  std::mt19937_64 rng(33);
  const TrigPoly f = hermitian_wave(basis, random_operator(4, rng));
  TrigPoly g = hermitian_wave(basis, random_operator(4, rng));
  g.add_term({0}, random_hermitian(4, rng));

  CHECK(f.is_hermitian_valued());
  CHECK(g.is_hermitian_valued());

  TrigPoly lop(basis, 4);
  lop.add_term({1}, random_operator(4, rng));
  CHECK_FALSE(lop.is_hermitian_valued());

  // i [F, G] stays Hermitian-valued; so does the essential primitive of a
  // zero-mean Hermitian-valued polynomial.
  const TrigPoly icomm = combine(Complex(0, 1), commutator_poly(f, g), 0.0, TrigPoly(basis, 4));
  CHECK(icomm.is_hermitian_valued(1e-11));
  CHECK(zero_mean_primitive(f).is_hermitian_valued(1e-11));
  for (double t : {0.0, 0.9, 3.3}) {
    CHECK(hermiticity_defect(evaluate(icomm, t)) < 1e-11 * icomm.max_coeff_norm());
  }
}
