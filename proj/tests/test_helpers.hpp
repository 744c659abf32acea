#pragma once

#include <random>

#include "pertprop/operators.hpp"

namespace pertprop::testing {

inline Operator pauli_x() {
  Operator s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

inline Operator pauli_y() {
  Operator s(2, 2);
  s << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return s;
}

inline Operator pauli_z() {
  Operator s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}

inline Operator pauli_plus() {  // |+><-| in the (|+>, |->) basis
  Operator s = Operator::Zero(2, 2);
  s(0, 1) = 1.0;
  return s;
}

inline Operator pauli_minus() {
  Operator s = Operator::Zero(2, 2);
  s(1, 0) = 1.0;
  return s;
}

inline Operator random_operator(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Operator m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      m(i, j) = Complex(gauss(rng), gauss(rng));
  return m;
}

inline Operator random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
  const Operator m = random_operator(dim, rng);
  return 0.5 * (m + m.adjoint());
}

}  // namespace pertprop::testing
