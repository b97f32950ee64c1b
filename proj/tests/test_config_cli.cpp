#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "postadc/config.hpp"
#include "postadc/errors.hpp"

using namespace postadc;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  const std::string path = "/tmp/" + name;
  std::ofstream out(path);
  out << body;
  return path;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(POSTADC_CLI_PATH) + " " + args +
                          " >/dev/null 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("defaults resolve to the desk-scale cell") {
  const ExperimentConfig cell = Config().resolve();
  CHECK(cell.algorithm == Algorithm::GpUcb);
  CHECK(cell.dim == 1);
  CHECK(cell.m_per_axis == 64);
  CHECK(cell.n_init == 5);
  CHECK(cell.n_steps == 15);
  CHECK(cell.replicates == 1000);
  CHECK(cell.sigma2 == 1.0);
  CHECK(cell.alpha == 0.05);
  CHECK(cell.ci_alpha == 0.10);
  CHECK(cell.gp.kappa == 2.0);
  CHECK(cell.gp.length_scale == doctest::Approx(0.1));  // 0.1 sqrt(1)
  CHECK(cell.tpe.gamma == 0.2);
  CHECK(cell.tpe.bandwidth == 0.1);
  CHECK(cell.target.window_side == doctest::Approx(0.2));
}

TEST_CASE("config file parsing with comments and overrides") {
  const std::string path = write_temp("postadc_cfg.txt",
                                      "# a comment\n"
                                      "algorithm = tpe\n"
                                      "n_steps=25   # trailing comment\n"
                                      "\n"
                                      "a = 2.5\n");
  Config config = Config::from_file(path);
  CHECK(config.get("algorithm") == "tpe");
  CHECK(config.get("n_steps") == "25");
  config.set("n_steps=40");  // command line wins
  const ExperimentConfig cell = config.resolve();
  CHECK(cell.algorithm == Algorithm::Tpe);
  CHECK(cell.n_steps == 40);
  CHECK(cell.objective.amplitude == 2.5);
}

TEST_CASE("dimension-adjusted defaults") {
  Config config;
  config.set("d", "3");
  config.set("window_base", "0.2");
  const ExperimentConfig cell = config.resolve();
  CHECK(cell.gp.length_scale == doctest::Approx(0.1 * std::sqrt(3.0)));
  CHECK(cell.target.window_side == doctest::Approx(std::pow(0.2, 1.0 / 3)));
  config.set("length_scale", "0.4");
  CHECK(config.resolve().gp.length_scale == 0.4);
}

TEST_CASE("config rejects unknown keys and bad values") {
  Config config;
  CHECK_THROWS_AS(config.set("no_such_key=1"), ConfigError);
  CHECK_THROWS_AS(config.set("not-a-pair"), ConfigError);
  config.set("alpha", "1.5");
  CHECK_THROWS_AS(config.resolve(), ConfigError);
  Config bad_alg;
  bad_alg.set("algorithm", "simulated_annealing");
  CHECK_THROWS_AS(bad_alg.resolve(), ConfigError);
  Config bad_num;
  bad_num.set("sigma2", "one");
  CHECK_THROWS_AS(bad_num.resolve(), ConfigError);
  CHECK_THROWS_AS(Config::from_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("echo lists effective keys as comment lines") {
  Config config;
  config.set("master_seed", "99");
  const std::string echo = config.echo();
  CHECK(echo.find("# algorithm=gpucb\n") != std::string::npos);
  CHECK(echo.find("# master_seed=99\n") != std::string::npos);
  // execution details stay out of result headers
  CHECK(echo.find("threads") == std::string::npos);
  for (std::size_t pos = 0; pos < echo.size();
       pos = echo.find('\n', pos) + 1) {
    if (pos >= echo.size()) break;
    CHECK(echo[pos] == '#');
  }
}

TEST_CASE("sweep grids fan out in declaration order") {
  Config config;
  config.set("algorithm", "gpucb,tpe");
  config.set("a", "0,1,2");
  config.set("n_steps", "10,20");
  const auto grid = config.sweep_grid();
  REQUIRE(grid.size() == 12);
  CHECK(grid[0].algorithm == Algorithm::GpUcb);
  CHECK(grid[0].objective.amplitude == 0.0);
  CHECK(grid[0].n_steps == 10);
  CHECK(grid[1].n_steps == 20);
  CHECK(grid[2].objective.amplitude == 1.0);
  CHECK(grid[6].algorithm == Algorithm::Tpe);
}

TEST_CASE("method list parsing") {
  Config config;
  config.set("methods", "post_adc,wo_eta,wo_t,randomized");
  const ExperimentConfig cell = config.resolve();
  REQUIRE(cell.methods.size() == 4);
  CHECK(cell.methods[1] == Method::WoEta);
  CHECK(cell.methods[3] == Method::Randomized);
  CHECK_THROWS_AS(parse_method("median"), ConfigError);
  config.set("methods", "");
  CHECK_THROWS_AS(config.resolve(), ConfigError);
}

TEST_CASE("cli exit codes") {
  SUBCASE("toy-check succeeds") {
    CHECK(run_cli("toy-check --draws 200") == 0);
  }
  SUBCASE("config errors exit 2") {
    CHECK(run_cli("infer bogus_key=1") == 2);
    CHECK(run_cli("infer -c /nonexistent.cfg") == 2);
    CHECK(run_cli("definitely-not-a-command") == 2);
  }
  SUBCASE("degenerate selection exits 4") {
    CHECK(run_cli("infer n_init=1 n_steps=0") == 4);
  }
  SUBCASE("verification failures exit 5") {
    CHECK(run_cli("scan-verify --instances 2 --grid 301 --corrupt-constraint") ==
          5);
  }
  SUBCASE("infer writes one row per method") {
    CHECK(run_cli("infer -o /tmp/postadc_infer_out.csv master_seed=3") == 0);
    std::ifstream in("/tmp/postadc_infer_out.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "# algorithm=gpucb");
    int data_rows = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
      if (line.rfind("replicate_id,", 0) == 0) saw_header = true;
      else if (!line.empty() && line[0] != '#') ++data_rows;
    }
    CHECK(saw_header);
    CHECK(data_rows == 3);  // post_adc, naive, bonferroni
  }
  SUBCASE("dump-constraints writes one constraint per line") {
    CHECK(run_cli("dump-constraints -o /tmp/postadc_dump.txt master_seed=3") ==
          0);
    std::ifstream in("/tmp/postadc_dump.txt");
    std::string header;
    std::getline(in, header);
    CHECK(header == "c,d_coef,sense,tag");
    int lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    CHECK(lines > 100);  // every acquisition step emits M-1 rows
  }
}
