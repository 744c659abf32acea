#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "pertprop/iontrap.hpp"
#include "pertprop/oracle.hpp"
#include "pertprop/td_expansion.hpp"
#include "pertprop/ti_expansion.hpp"

namespace {

using namespace pertprop;

IonTrapParams model(int cutoff) {
  IonTrapParams p;
  p.nu = 1.0;
  p.alpha = 0.5;
  p.epsilon = 1.5;
  p.lambda = 1.0;
  p.eta = 0.1;
  p.phi = -M_PI / 2.0;
  p.cutoff = cutoff;
  p.f = [](int) { return 0.1; };
  return p;
}

TrigPoly picture(const IonTrapParams& p) {
  const ModelHamiltonian mh = build_hamiltonian(p, HamiltonianForm::GeneralizedGF);
  return interaction_picture(p, mh.h0, mh.h_drive);
}

std::vector<TrigPoly> chain_of(const TrigPoly& h1, int order) {
  std::vector<TrigPoly> chain(order, TrigPoly(h1.basis(), h1.dim()));
  chain[0] = h1;
  return chain;
}

void bm_solve_ti(benchmark::State& state) {
  const IonTrapParams p = model(static_cast<int>(state.range(0)));
  const RotatingFrame rf = rotating_frame(p);
  const int order = static_cast<int>(state.range(1));
  std::vector<Operator> h_list(order,
                               Operator::Zero(rf.frak_h1.rows(), rf.frak_h1.cols()));
  h_list[0] = rf.frak_h1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_ti(rf.frak_h0, h_list, order));
  }
}

void bm_solve_td_mean(benchmark::State& state) {
  const IonTrapParams p = model(static_cast<int>(state.range(0)));
  const TrigPoly h1 = picture(p);
  const int order = static_cast<int>(state.range(1));
  const std::vector<TrigPoly> chain = chain_of(h1, order);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_td_mean(chain, order));
  }
}

void bm_evolution_td(benchmark::State& state) {
  const IonTrapParams p = model(static_cast<int>(state.range(0)));
  const TrigPoly h1 = picture(p);
  const TDSolution sol = solve_td_mean(chain_of(h1, 2), 2);
  const Operator id = Operator::Identity(h1.dim(), h1.dim());
  double t = 0.0;
  for (auto _ : state) {
    t += 0.1;
    benchmark::DoNotOptimize(evolution_td(sol, 0.05, t, id));
  }
}

void bm_oracle(benchmark::State& state) {
  const IonTrapParams p = model(static_cast<int>(state.range(0)));
  const TrigPoly h1 = picture(p);
  const TrigPoly scaled = combine(0.05, h1, 0.0, TrigPoly(h1.basis(), h1.dim()));
  const double tol = std::pow(10.0, -static_cast<double>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_schrodinger(scaled, 6.0, tol));
  }
}

}  // namespace

BENCHMARK(bm_solve_ti)->Args({8, 1})->Args({16, 1})->Args({16, 3});
BENCHMARK(bm_solve_td_mean)->Args({8, 1})->Args({16, 1})->Args({16, 2});
BENCHMARK(bm_evolution_td)->Arg(8)->Arg(16);
BENCHMARK(bm_oracle)->Args({8, 8})->Args({8, 11});

BENCHMARK_MAIN();
