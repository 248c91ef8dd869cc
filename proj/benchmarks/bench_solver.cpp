#include <benchmark/benchmark.h>

#include <random>

#include "epool/analytic_normal.hpp"
#include "epool/entropy_solver.hpp"
#include "epool/view_compiler.hpp"

namespace {

// Standard-normal panel with a +2 sigma mean view and, for the second variant,
// a variance-halving view anchored at the new mean.
epool::LinearConstraintSet normal_views(const Eigen::VectorXd& x, bool variance) {
  epool::ConstraintRows rows(static_cast<std::size_t>(x.size()));
  rows.add(x, epool::Direction::Equal, 2.0);
  if (variance) rows.add(x.array().square().matrix(), epool::Direction::Equal, 0.5 + 4.0);
  return epool::LinearConstraintSet::from_rows(rows);
}

Eigen::VectorXd draws(std::size_t J) {
  const epool::NormalModel ref(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
  return epool::discretize(ref, J, 1).first.data().col(0);
}

void BM_MeanView(benchmark::State& state) {
  const auto J = static_cast<std::size_t>(state.range(0));
  const Eigen::VectorXd x = draws(J);
  const auto c = normal_views(x, state.range(1) != 0);
  const auto prior = epool::ProbabilityVector::uniform(J);
  for (auto _ : state) {
    auto r = epool::solve(c, prior);
    benchmark::DoNotOptimize(r.relative_entropy);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MeanView)->ArgsProduct({{1000, 10000, 100000}, {0, 1}})->Unit(benchmark::kMillisecond);

// Many inequality rows: exercises the quasi-Newton path above the exact-Hessian limit.
void BM_ManyRows(benchmark::State& state) {
  const auto M = static_cast<int>(state.range(0));
  const Eigen::Index J = 5000;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  Eigen::MatrixXd cols(J, M);
  for (Eigen::Index j = 0; j < J; ++j)
    for (int k = 0; k < M; ++k) cols(j, k) = n(rng);
  epool::ConstraintRows rows(static_cast<std::size_t>(J));
  for (int k = 0; k < M; ++k) rows.add(cols.col(k), epool::Direction::LessEqual, -0.01);
  const auto c = epool::LinearConstraintSet::from_rows(rows);
  const auto prior = epool::ProbabilityVector::uniform(static_cast<std::size_t>(J));
  for (auto _ : state) {
    auto r = epool::solve(c, prior);
    benchmark::DoNotOptimize(r.relative_entropy);
  }
}
BENCHMARK(BM_ManyRows)->Arg(10)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
