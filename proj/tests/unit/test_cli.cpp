#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "epool/scenario.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("epool_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& content) const { std::ofstream(dir_ / name) << content; }

  std::string read(const std::string& name) const {
    std::ifstream in(dir_ / name, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  int run(const std::string& args) const {
    const std::string cmd = std::string(EPOOL_CLI_PATH) + " " + args + " > " + path("stdout.txt") + " 2> " +
                            path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  void write_panel(std::size_t J = 300) const {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n;
    std::ostringstream csv;
    csv << "A,B\n";
    for (std::size_t j = 0; j < J; ++j) csv << n(rng) << "," << n(rng) << "\n";
    write("panel.csv", csv.str());
  }

  fs::path dir_;
};

const char* kMeanView =
    R"([{"kind": "MeanLocation", "columns": ["A"], "direction": "=", "target": {"mode": "Absolute", "value": 0.2}}])";

}  // namespace

TEST_F(Cli, EmptyViewsReproducePriorFileByteForByte) {
  write_panel();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  Eigen::VectorXd w(300);
  for (Eigen::Index j = 0; j < 300; ++j) w[j] = u(rng);
  epool::write_probabilities(epool::ProbabilityVector(w / w.sum()), path("prior.txt"));
  write("views.json", "[]");
  ASSERT_EQ(run("solve --panel " + path("panel.csv") + " --views " + path("views.json") + " --prior " +
                path("prior.txt") + " --out " + path("post.txt")),
            0)
      << read("stderr.txt");
  EXPECT_EQ(read("post.txt"), read("prior.txt"));
}

TEST_F(Cli, SolveWritesPosteriorAndDiagnostics) {
  write_panel();
  write("views.json", kMeanView);
  ASSERT_EQ(run("solve --panel " + path("panel.csv") + " --views " + path("views.json") + " --out " +
                path("post.txt") + " --diagnostics " + path("diag.json")),
            0)
      << read("stderr.txt");
  const auto post = epool::read_probabilities(path("post.txt"), 300);
  const auto panel = epool::read_panel_csv(path("panel.csv"));
  EXPECT_NEAR(panel.column("A").dot(post.weights()), 0.2, 1e-8);
  const std::string diag = read("diag.json");
  EXPECT_NE(diag.find("\"converged\": true"), std::string::npos) << diag;
  EXPECT_NE(diag.find("relative_entropy"), std::string::npos);
}

TEST_F(Cli, DeterministicOutputs) {
  write_panel();
  write("views.json", kMeanView);
  const std::string args = "solve --panel " + path("panel.csv") + " --views " + path("views.json") + " --out ";
  ASSERT_EQ(run(args + path("a.txt")), 0);
  ASSERT_EQ(run(args + path("b.txt")), 0);
  EXPECT_EQ(read("a.txt"), read("b.txt"));

  ASSERT_EQ(run("synth --out " + path("h1.csv") + " --rows 120 --seed 3 --book-out " + path("book.json")), 0);
  ASSERT_EQ(run("synth --out " + path("h2.csv") + " --rows 120 --seed 3"), 0);
  EXPECT_EQ(read("h1.csv"), read("h2.csv"));
  ASSERT_EQ(run("bootstrap --history " + path("h1.csv") + " --out " + path("s1.csv") + " -J 600 --seed 9"), 0);
  ASSERT_EQ(run("bootstrap --history " + path("h1.csv") + " --out " + path("s2.csv") + " -J 600 --seed 9"), 0);
  EXPECT_EQ(read("s1.csv"), read("s2.csv"));
}

TEST_F(Cli, ExitCodes) {
  write_panel();
  write("bad.json", "[{\"kind\": ");
  EXPECT_EQ(run("solve --panel " + path("panel.csv") + " --views " + path("bad.json") + " --out " + path("o.txt")),
            2);
  EXPECT_EQ(run("solve --panel " + path("panel.csv")), 2);
  write("contradictory.json",
        R"([{"kind": "MeanLocation", "columns": ["A"], "direction": "=", "target": {"mode": "Absolute", "value": 0}},
            {"kind": "MeanLocation", "columns": ["A"], "direction": "=", "target": {"mode": "Absolute", "value": 1}}])");
  EXPECT_EQ(run("solve --panel " + path("panel.csv") + " --views " + path("contradictory.json") + " --out " +
                path("o.txt")),
            3)
      << read("stderr.txt");
  EXPECT_FALSE(fs::exists(path("o.txt")));
  write("views.json", kMeanView);
  EXPECT_EQ(run("solve --panel " + path("panel.csv") + " --views " + path("views.json") + " --out " + path("o.txt") +
                " --max-iter 1"),
            4);
}

TEST_F(Cli, FrontierFromSynthesizedDesk) {
  ASSERT_EQ(run("synth --out " + path("h.csv") + " --rows 200 --seed 1 --book-out " + path("book.json")), 0);
  ASSERT_EQ(run("bootstrap --history " + path("h.csv") + " --out " + path("s.csv") + " --prior-out " +
                path("p.txt") + " -J 2000 --seed 2"),
            0);
  ASSERT_EQ(run("frontier --panel " + path("s.csv") + " --prior " + path("p.txt") + " --book " + path("book.json") +
                " --lambdas 0,1000000 --out " + path("f.csv")),
            0)
      << read("stderr.txt");
  std::istringstream csv(read("f.csv"));
  std::string header, first, last;
  std::getline(csv, header);
  std::getline(csv, first);
  std::getline(csv, last);
  EXPECT_EQ(header.rfind("lambda,", 0), 0u);
  EXPECT_NE(header.find("expected_pnl,cvar"), std::string::npos);
  EXPECT_EQ(last, "1000000,0,0,0,0,0,0,0,0,0,0,0");
}

TEST_F(Cli, CompareAnalytical) {
  write("model.json", R"({"mu": [0], "sigma": [[1]]})");
  write("views.json", R"({"q": [[1]], "mu_q": [1]})");
  ASSERT_EQ(run("compare-analytical --model " + path("model.json") + " --views " + path("views.json") +
                " -J 5000 --seed 2 --out " + path("r.json")),
            0)
      << read("stderr.txt");
  EXPECT_NE(read("r.json").find("max_mean_gap"), std::string::npos);
}
