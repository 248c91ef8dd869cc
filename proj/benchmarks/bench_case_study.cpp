#include <benchmark/benchmark.h>

#include "epool/bootstrap.hpp"
#include "epool/frontier.hpp"

namespace {

const epool::CaseStudyMarket& market() {
  static const epool::CaseStudyMarket m;
  return m;
}

const epool::ScenarioPanel& history() {
  static const auto h = market().synthetic_history(700, 1);
  return h;
}

void BM_Bootstrap(benchmark::State& state) {
  epool::BootstrapConfig config;
  config.num_scenarios = static_cast<std::size_t>(state.range(0));
  config.seed = 2;
  for (auto _ : state) {
    auto out = epool::kernel_bootstrap(history(), config);
    benchmark::DoNotOptimize(out.first.data().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Bootstrap)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_PnlPanel(benchmark::State& state) {
  epool::BootstrapConfig config;
  config.num_scenarios = static_cast<std::size_t>(state.range(0));
  const auto panel = epool::kernel_bootstrap(history(), config).first;
  const auto book = market().book();
  for (auto _ : state) {
    auto pnl = epool::build_pnl_panel(panel, book);
    benchmark::DoNotOptimize(pnl.data.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<long>(book.size()));
}
BENCHMARK(BM_PnlPanel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Frontier(benchmark::State& state) {
  epool::BootstrapConfig config;
  config.num_scenarios = static_cast<std::size_t>(state.range(0));
  const auto [panel, p] = epool::kernel_bootstrap(history(), config);
  const auto book = market().book();
  std::vector<double> prices;
  for (const auto& c : book) prices.push_back(epool::current_price(c));
  const auto pnl = epool::build_pnl_panel(panel, book, prices);
  epool::FrontierSpec spec;
  spec.lambdas = {0.0, 0.5, 1.0, 2.0, 1e6};
  spec.position_bounds = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(book.size()));
  spec.constraints = epool::zero_budget_zero_delta(book, prices);
  for (auto _ : state) {
    auto f = epool::mean_cvar_frontier(pnl, p, spec);
    benchmark::DoNotOptimize(f.data());
  }
}
BENCHMARK(BM_Frontier)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
