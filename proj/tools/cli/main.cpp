#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "epool/analytic_comparison.hpp"
#include "epool/bootstrap.hpp"
#include "epool/error.hpp"
#include "epool/frontier.hpp"
#include "epool/json_io.hpp"
#include "epool/pipeline.hpp"
#include "epool_service/service.hpp"

#include <CLI11.hpp>
#include <httplib.h>

namespace {

constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNotConverged = 4;

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw epool::ParseError("bad number '" + item + "' in " + what);
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream file(path);
  if (!file) throw epool::Error("cannot open " + path + " for writing");
  file << content;
}

struct SolveArgs {
  std::string panel, views, prior, out, diagnostics, confidence;
  double tol = 1e-9;
  int max_iter = 500;
};

int run_solve(const SolveArgs& a) {
  const auto panel = epool::read_panel_csv(a.panel);
  const auto prior = a.prior.empty() ? epool::ProbabilityVector::uniform(panel.num_scenarios())
                                     : epool::read_probabilities(a.prior, panel.num_scenarios());
  auto doc = epool::read_view_document(a.views);
  if (!a.confidence.empty()) {
    const auto c = parse_list(a.confidence, "--confidence");
    if (c.size() != doc.users.size())
      throw epool::ParseError("--confidence needs one value per user (" + std::to_string(doc.users.size()) + ")");
    for (std::size_t u = 0; u < c.size(); ++u) doc.users[u].overall_confidence = c[u];
    doc.confidence_spec().validate();
  }
  epool::SolverConfig config;
  config.dual_tolerance = a.tol;
  config.max_iterations = a.max_iter;
  config.validate();

  const auto pooled = epool::solve_view_document(panel, prior, doc, config);
  const auto diagnostics = pooled.diagnostics(prior).dump(2);
  if (!a.diagnostics.empty()) write_text(a.diagnostics, diagnostics + "\n");
  std::cout << diagnostics << '\n';
  if (pooled.status == epool::SolveStatus::Infeasible) {
    std::cerr << "infeasible: " << pooled.message << '\n';
    return kExitInfeasible;
  }
  if (pooled.status == epool::SolveStatus::NotConverged) {
    std::cerr << "not converged: " << pooled.message << '\n';
    return kExitNotConverged;
  }
  epool::write_probabilities(*pooled.posterior, a.out);
  return 0;
}

struct CompareArgs {
  std::string model, views, out, scheme = "stratified";
  std::size_t scenarios = 100000;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  int max_iter = 500;
};

int run_compare(const CompareArgs& a) {
  const auto model = epool::normal_model_from_json(epool::read_json_file(a.model));
  const auto views = epool::normal_views_from_json(epool::read_json_file(a.views));
  epool::SolverConfig config;
  config.dual_tolerance = a.tol;
  config.max_iterations = a.max_iter;
  if (a.scheme != "stratified" && a.scheme != "montecarlo")
    throw epool::ParseError("--scheme must be stratified or montecarlo");
  const auto scheme =
      a.scheme == "stratified" ? epool::Discretization::Stratified : epool::Discretization::MonteCarlo;
  const auto r = epool::compare_analytical(model, views, a.scenarios, a.seed, config, scheme);
  epool::Json report = {{"analytical", epool::to_json(r.analytical)},
                        {"numerical",
                         {{"mu", epool::to_json(r.numerical_mean)},
                          {"sigma", epool::to_json(r.numerical_covariance)}}},
                        {"max_mean_gap", r.max_mean_gap},
                        {"max_relative_std_gap", r.max_relative_std_gap},
                        {"diagnostics", epool::diagnostics_json(r.solve)}};
  if (!a.out.empty()) write_text(a.out, report.dump(2) + "\n");
  std::cout << report.dump(2) << '\n';
  if (r.solve.status == epool::SolveStatus::Infeasible) return kExitInfeasible;
  if (r.solve.status == epool::SolveStatus::NotConverged) return kExitNotConverged;
  return 0;
}

struct FrontierArgs {
  std::string panel, posterior, book, out, lambdas = "0,0.5,1,2,5,10,1000000", constraints = "zero_budget_zero_delta";
  double gamma = 0.95;
  double cap = 1.0;
  std::size_t targets = 30;
};

int run_frontier(const FrontierArgs& a) {
  const auto panel = epool::read_panel_csv(a.panel);
  const auto p = a.posterior.empty() ? epool::ProbabilityVector::uniform(panel.num_scenarios())
                                     : epool::read_probabilities(a.posterior, panel.num_scenarios());
  const auto book = epool::read_book(a.book);
  std::vector<double> prices;
  for (const auto& c : book) prices.push_back(epool::current_price(c));
  const auto pnl = epool::build_pnl_panel(panel, book, prices);
  if (!pnl.flagged_scenarios.empty())
    std::cerr << pnl.flagged_scenarios.size() << " scenarios had a non-positive smile vol\n";

  epool::FrontierSpec spec;
  spec.gamma = a.gamma;
  spec.lambdas = parse_list(a.lambdas, "--lambdas");
  spec.position_bounds = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(book.size()), a.cap);
  spec.num_variance_targets = a.targets;
  if (a.constraints == "zero_budget_zero_delta")
    spec.constraints = epool::zero_budget_zero_delta(book, prices);
  else if (a.constraints != "none")
    throw epool::ParseError("--constraints must be zero_budget_zero_delta or none");
  const auto frontier = epool::mean_cvar_frontier(pnl, p, spec);
  const auto csv = epool::format_frontier_csv(frontier, pnl.instrument_ids);
  if (a.out.empty())
    std::cout << csv;
  else
    write_text(a.out, csv);
  return 0;
}

struct BootstrapArgs {
  std::string history, out, prior_out;
  std::size_t scenarios = 10000;
  double epsilon = 0.15;
  std::uint64_t seed = 1;
};

int run_bootstrap(const BootstrapArgs& a) {
  const auto history = epool::read_panel_csv(a.history);
  const auto [panel, p] = epool::kernel_bootstrap(history, {a.epsilon, a.scenarios, a.seed});
  epool::write_panel_csv(panel, a.out);
  if (!a.prior_out.empty()) epool::write_probabilities(p, a.prior_out);
  return 0;
}

struct SynthArgs {
  std::string history, book;
  std::size_t rows = 700;
  std::uint64_t seed = 1;
};

int run_synth(const SynthArgs& a) {
  epool::CaseStudyMarket market;
  epool::write_panel_csv(market.synthetic_history(a.rows, a.seed), a.history);
  if (!a.book.empty()) {
    epool::Json book = epool::Json::array();
    for (const auto& c : market.book()) book.push_back(epool::to_json(c));
    write_text(a.book, book.dump(2) + "\n");
  }
  return 0;
}

struct ServeArgs {
  std::string host = "127.0.0.1", snapshot_dir;
  int port = 8080;
};

int run_serve(const ServeArgs& a) {
  epool::service::ServiceOptions options;
  if (!a.snapshot_dir.empty()) options.snapshot_dir = a.snapshot_dir;
  epool::service::Service service(options);
  httplib::Server server;
  epool::service::register_routes(server, service);
  std::cerr << "listening on " << a.host << ':' << a.port << '\n';
  return server.listen(a.host, a.port) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-pooling scenario reweighting"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* cmd_solve = app.add_subcommand("solve", "Posterior probabilities for a view file");
  cmd_solve->add_option("--panel", solve.panel, "Scenario panel CSV")->required();
  cmd_solve->add_option("--views", solve.views, "Views JSON")->required();
  cmd_solve->add_option("--prior", solve.prior, "Prior probabilities, one per line (default uniform)");
  cmd_solve->add_option("--out", solve.out, "Posterior output file")->required();
  cmd_solve->add_option("--diagnostics", solve.diagnostics, "Diagnostics JSON output file");
  cmd_solve->add_option("--confidence", solve.confidence, "Comma-separated overall confidence per user");
  cmd_solve->add_option("--tol", solve.tol, "Dual gradient tolerance");
  cmd_solve->add_option("--max-iter", solve.max_iter, "Newton iteration cap");

  CompareArgs compare;
  auto* cmd_compare = app.add_subcommand("compare-analytical", "Closed-form normal posterior vs numerical solve");
  cmd_compare->add_option("--model", compare.model, "Normal model JSON {mu, sigma}")->required();
  cmd_compare->add_option("--views", compare.views, "Normal views JSON {q, mu_q, g, sigma_g}")->required();
  cmd_compare->add_option("-J,--scenarios", compare.scenarios, "Number of scenarios");
  cmd_compare->add_option("--seed", compare.seed, "Random seed");
  cmd_compare->add_option("--out", compare.out, "Report JSON output file");
  cmd_compare->add_option("--scheme", compare.scheme, "stratified or montecarlo draws");
  cmd_compare->add_option("--tol", compare.tol, "Dual gradient tolerance");
  cmd_compare->add_option("--max-iter", compare.max_iter, "Newton iteration cap");

  FrontierArgs frontier;
  auto* cmd_frontier = app.add_subcommand("frontier", "Mean-CVaR frontier of a butterfly book");
  cmd_frontier->add_option("--panel", frontier.panel, "Scenario panel CSV")->required();
  cmd_frontier->add_option("--posterior,--prior", frontier.posterior, "Scenario probabilities (default uniform)");
  cmd_frontier->add_option("--book", frontier.book, "Book JSON")->required();
  cmd_frontier->add_option("--out", frontier.out, "Frontier CSV output (default stdout)");
  cmd_frontier->add_option("--gamma", frontier.gamma, "CVaR level");
  cmd_frontier->add_option("--lambdas", frontier.lambdas, "Comma-separated risk aversions");
  cmd_frontier->add_option("--cap", frontier.cap, "Absolute position cap per instrument");
  cmd_frontier->add_option("--targets", frontier.targets, "Number of variance targets");
  cmd_frontier->add_option("--constraints", frontier.constraints, "zero_budget_zero_delta or none");

  BootstrapArgs boot;
  auto* cmd_boot = app.add_subcommand("bootstrap", "Kernel bootstrap of a history panel");
  cmd_boot->add_option("--history", boot.history, "History CSV")->required();
  cmd_boot->add_option("--out", boot.out, "Scenario panel CSV output")->required();
  cmd_boot->add_option("--prior-out", boot.prior_out, "Probability file output");
  cmd_boot->add_option("-J,--scenarios", boot.scenarios, "Number of scenarios");
  cmd_boot->add_option("--epsilon", boot.epsilon, "Kernel bandwidth multiplier");
  cmd_boot->add_option("--seed", boot.seed, "Random seed");

  SynthArgs synth;
  auto* cmd_synth = app.add_subcommand("synth", "Synthetic three-name option desk history");
  cmd_synth->add_option("--out", synth.history, "History CSV output")->required();
  cmd_synth->add_option("--book-out", synth.book, "Book JSON output");
  cmd_synth->add_option("--rows", synth.rows, "Number of daily rows");
  cmd_synth->add_option("--seed", synth.seed, "Random seed");

  ServeArgs serve;
  auto* cmd_serve = app.add_subcommand("serve", "HTTP session service");
  cmd_serve->add_option("--host", serve.host, "Bind address");
  cmd_serve->add_option("--port", serve.port, "Port");
  cmd_serve->add_option("--snapshot-dir", serve.snapshot_dir, "Directory for session snapshots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*cmd_solve) return run_solve(solve);
    if (*cmd_compare) return run_compare(compare);
    if (*cmd_frontier) return run_frontier(frontier);
    if (*cmd_boot) return run_bootstrap(boot);
    if (*cmd_synth) return run_synth(synth);
    if (*cmd_serve) return run_serve(serve);
  } catch (const epool::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const epool::InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
