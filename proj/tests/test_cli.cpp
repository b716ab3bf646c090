#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "latgibbs/cli.hpp"
#include "latgibbs/errors.hpp"

using namespace latgibbs;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const std::string& name) {
  return std::string("/tmp/latgibbs_test_") + name;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(LATGIBBS_CLI_PATH) + " " + args +
                    " >/dev/null 2>/dev/null";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("parse_config_text accepts and validates key=value text") {
  RunConfig cfg =
      parse_config_text("model=potts q=3 beta=0.5 L=2 window=0,0,0,0 seed=7");
  CHECK(cfg.model == "potts");
  CHECK(cfg.q == 3);
  CHECK(cfg.beta == doctest::Approx(0.5));
  CHECK(cfg.mesh_l == 2);
  CHECK(cfg.window == std::array<std::int32_t, 4>{0, 0, 0, 0});
  CHECK(cfg.seed == 7);
  CHECK(cfg.strategy == Strategy::exact_min);  // documented default
  CHECK(cfg.budget == 10'000'000);             // documented default

  RunConfig mono = parse_config_text("model=ising strategy=monotone");
  CHECK(mono.strategy == Strategy::monotone_extremes);

  CHECK_THROWS_AS(parse_config_text("model=potts q=3 strategy=monotone"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("nonsense=1"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("model=potts beta=abc"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("model=potts L=1"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("model=potts window=3,0,0,0"), ConfigError);
}

TEST_CASE("parse_config enforces per-subcommand required keys") {
  CHECK_THROWS_AS(parse_config({"sample", "--model", "ising", "--mesh-l", "2"}),
                  ConfigError);  // missing window
  CHECK_THROWS_AS(parse_config({"sample", "--model", "ising", "--window",
                                "0,0,0,0"}),
                  ConfigError);  // missing L
  CHECK_THROWS_AS(parse_config({"sample", "--mesh-l", "2", "--window",
                                "0,0,0,0"}),
                  ConfigError);  // missing model
  CHECK_THROWS_AS(parse_config({"sample", "--model", "ising", "--mesh-l", "2",
                                "--window", "0,0,0,0", "--bogus", "1"}),
                  ConfigError);  // unknown flag

  Invocation inv = parse_config({"sample", "--model", "ising", "--beta", "0.3",
                                 "--h", "1.5", "--mesh-l", "2", "--window",
                                 "0,0,0,0", "--seed", "9"});
  CHECK(inv.cmd == Subcommand::sample);
  CHECK(inv.config.h == doctest::Approx(1.5));

  // check-oracle needs no model.
  Invocation co = parse_config({"check-oracle", "--samples", "5"});
  CHECK(co.cmd == Subcommand::check_oracle);
}

TEST_CASE("flags override config-file values") {
  const std::string path = temp_path("cfg");
  {
    std::ofstream out(path);
    out << "model=ising\nbeta=0.4\nh=1.5\nL=2\nwindow=0,0,1,1\nseed=3\n";
  }
  Invocation inv =
      parse_config({"sample", "--config", path, "--beta", "0.9"});
  CHECK(inv.config.beta == doctest::Approx(0.9));  // flag wins
  CHECK(inv.config.h == doctest::Approx(1.5));     // file value survives
  CHECK(inv.config.seed == 3);

  {
    std::ofstream out(path);
    out << "model=ising\nunknown_key=1\n";
  }
  CHECK_THROWS_AS(parse_config({"sample", "--config", path, "--mesh-l", "2",
                                "--window", "0,0,0,0"}),
                  ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("execute sample writes a deterministic grid") {
  const std::string p1 = temp_path("grid1"), p2 = temp_path("grid2");
  Invocation inv = parse_config({"sample", "--model", "potts", "--q", "2",
                                 "--beta", "0", "--mesh-l", "2", "--window",
                                 "0,0,0,0", "--seed", "5", "--out", p1});
  std::ostringstream diag;
  CHECK(execute(inv, diag) == 0);
  inv.config.out = p2;
  CHECK(execute(inv, diag) == 0);
  std::string g1 = slurp(p1), g2 = slurp(p2);
  CHECK(g1 == g2);
  CHECK(g1.rfind("# latgibbs sample", 0) == 0);
  // A single spin line, 1-based.
  std::istringstream in(g1);
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') last = line;
  CHECK((last == "1" || last == "2"));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("execute multi-sample emits one block per sample") {
  const std::string p = temp_path("grid3");
  Invocation inv = parse_config({"sample", "--model", "ising", "--beta", "0.2",
                                 "--mesh-l", "2", "--window", "0,0,1,1",
                                 "--seed", "1", "--samples", "3", "--out", p});
  std::ostringstream diag;
  CHECK(execute(inv, diag) == 0);
  std::string text = slurp(p);
  std::size_t blocks = 0, pos = 0;
  while ((pos = text.find("# sample=", pos)) != std::string::npos) {
    ++blocks;
    pos += 1;
  }
  CHECK(blocks == 3);
  std::remove(p.c_str());
}

TEST_CASE("execute marginal agrees across engines") {
  const std::string p = temp_path("marg");
  Invocation inv = parse_config({"marginal", "--model", "ising", "--beta",
                                 "0.6", "--h", "1.4", "--window", "0,0,1,1",
                                 "--out", p});
  std::ostringstream diag;
  CHECK(execute(inv, diag) == 0);
  std::string text = slurp(p);
  auto pos = text.find("# max_abs_diff=");
  REQUIRE(pos != std::string::npos);
  double diff = std::stod(text.substr(pos + 15));
  CHECK(diff <= 1e-10);
  std::remove(p.c_str());
}

TEST_CASE("budget abort exits with code 3") {
  const std::string p = temp_path("abort");
  Invocation inv = parse_config({"sample", "--model", "ising", "--beta", "0.3",
                                 "--mesh-l", "2", "--window", "0,0,0,0",
                                 "--strategy", "trivial", "--budget", "50",
                                 "--out", p});
  std::ostringstream diag;
  CHECK(execute(inv, diag) == 3);
  CHECK(diag.str().find("budget abort") != std::string::npos);
  std::remove(p.c_str());
}

TEST_CASE("cap violation exits with code 4 through the binary") {
  CHECK(run_cli("marginal --model potts --q 3 --beta 0.2 --window 0,0,4,4 "
                "--enum-cap 100") == 4);
}

TEST_CASE("config error exits with code 2 through the binary") {
  CHECK(run_cli("sample --model potts --q 3 --strategy monotone --mesh-l 2 "
                "--window 0,0,0,0") == 2);
  CHECK(run_cli("frobnicate") == 2);
}

TEST_CASE("binary runs are byte-identical for a fixed config and seed") {
  const std::string p1 = temp_path("det1"), p2 = temp_path("det2");
  const std::string args =
      "stats --model ising --beta 0.3 --mesh-l 2 --window 0,0,3,3 --seed 4 "
      "--samples 25 --budget 100000 --out ";
  CHECK(run_cli(args + p1) == 0);
  CHECK(run_cli(args + p2) == 0);
  CHECK(slurp(p1) == slurp(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}
