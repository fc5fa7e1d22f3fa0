#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "holonet/error.hpp"
#include "run_config.hpp"
#include "support.hpp"

using namespace holonet;
using namespace holonet::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "holonet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("holonet_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("config parsing") {
  RunConfig c;
  std::istringstream in("# comment\n[model]\nwidths = 2, 8\nalpha = 0.25\n\n[run]\nseed=9\n");
  c.merge(in, "test.ini");
  CHECK(c.numbers("model", "widths") == std::vector<double>{2.0, 8.0});
  CHECK(c.number("model", "alpha") == 0.25);
  CHECK(c.integer("run", "seed") == 9);
  CHECK(c.integer("run", "threads") == 1);

  std::istringstream unknown("[model]\ndepth = 3\n");
  CHECK_THROWS_AS(c.merge(unknown, "bad.ini"), InputError);
  std::istringstream orphan("alpha = 1\n");
  CHECK_THROWS_AS(c.merge(orphan, "bad.ini"), InputError);
  CHECK_THROWS_AS(c.set("model.alpha"), InputError);

  c.set("run.command=train");
  c.set("model.alpha=abc");
  CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("echoed config parses back to the same values") {
  RunConfig c;
  c.set("run.command=converge");
  c.set("converge.c_grid=1, 100");
  std::ostringstream first;
  c.write(first);
  RunConfig back;
  std::istringstream in(first.str());
  back.merge(in, "echo");
  std::ostringstream second;
  back.write(second);
  CHECK(first.str() == second.str());
}

TEST_CASE("reaches on the Fig. 1 file") {
  const fs::path out = scratch("reaches");
  const Run r = run({"reaches", "--graph", holonet::testing::data_path("fig1.tsv").string(), "--out", out.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("R1 = {1, 2, 3}") != std::string::npos);
  CHECK(r.out.find("R2 = {2, 3, 4, 5, 6}") != std::string::npos);
  CHECK(fs::exists(out / "reaches.txt"));
  CHECK(fs::exists(out / "config.ini"));
}

TEST_CASE("missing graph file is a config error naming the path") {
  const Run r = run({"reaches", "--graph", "/no/such/graph.tsv", "--out", scratch("missing").string()});
  CHECK(r.code == kExitConfigError);
  CHECK(r.err.find("/no/such/graph.tsv") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitConfigError);
  CHECK(run({"frobnicate"}).code == kExitConfigError);
  CHECK(run({"reaches", "--out", scratch("nograph").string()}).code == kExitConfigError);
  CHECK(run({"train", "--set", "model.bogus=1", "--out", scratch("bogus").string()}).code == kExitConfigError);
  CHECK(run({"eval", "--out", scratch("nockpt").string()}).code == kExitConfigError);
}

TEST_CASE("oracle-check passes by default") {
  const Run r = run({"oracle-check", "--out", scratch("oracle").string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("check subcommands exit 1 on failed assertions") {
  CHECK(run({"gradcheck", "--set", "check.tolerance=1e-30", "--out", scratch("gc").string()}).code ==
        kExitCheckFailed);
  CHECK(run({"converge", "--set", "converge.max_ratio=1e-30", "--out", scratch("cv").string()}).code ==
        kExitCheckFailed);
  CHECK(run({"gradcheck", "--out", scratch("gc_ok").string()}).code == kExitOk);
}

TEST_CASE("non-finite loss is a numerical failure") {
  const Run r = run({"train", "--set", "train.optimizer=sgd", "--set", "train.learning_rate=1e300", "--set",
                     "train.epochs=5", "--out", scratch("nan").string()});
  CHECK(r.code == kExitNumericalError);
}

TEST_CASE("re-running the echoed config reproduces CSVs byte for byte") {
  const fs::path a = scratch("echo_a");
  const fs::path b = scratch("echo_b");
  REQUIRE(run({"train", "--set", "train.epochs=20", "--set", "data.n_nodes=40", "--set", "run.seed=4", "--out",
               a.string()})
              .code == kExitOk);
  REQUIRE(run({"train", "--config", (a / "config.ini").string(), "--out", b.string()}).code == kExitOk);
  CHECK(slurp(a / "loss_curve.csv") == slurp(b / "loss_curve.csv"));
  CHECK(slurp(a / "model.cbor") == slurp(b / "model.cbor"));

  REQUIRE(run({"converge", "--graph", holonet::testing::data_path("two_scale.tsv").string(), "--out", a.string()})
              .code == kExitOk);
  REQUIRE(run({"converge", "--config", (a / "config.ini").string(), "--out", b.string()}).code == kExitOk);
  CHECK(slurp(a / "convergence.csv") == slurp(b / "convergence.csv"));
}

TEST_CASE("train then eval on the two-scale task") {
  const fs::path out = scratch("two_scale");
  const Run t = run({"train", "--set", "train.task=two_scale", "--set", "model.operator=laplacian", "--set",
                     "bank.kind=resolvent", "--set", "model.widths=4, 8", "--set", "model.output_dim=1", "--set",
                     "train.epochs=30", "--set", "data.n_graphs=20", "--set", "data.n_test=5", "--out", out.string()});
  REQUIRE(t.code == kExitOk);
  const Run e = run({"eval", "--config", (out / "config.ini").string(), "--set",
                     "train.checkpoint=" + (out / "model.cbor").string(), "--out", scratch("two_scale_eval").string()});
  CHECK(e.code == kExitOk);
  CHECK(e.out.find("coarse_fine_ratio") != std::string::npos);
}

TEST_CASE("filter-apply and coarsen write their artifacts") {
  const fs::path out = scratch("filter");
  const std::string graph = holonet::testing::data_path("two_scale.tsv").string();
  CHECK(run({"filter-apply", "--graph", graph, "--set", "filter.function=resolvent", "--set",
             "filter.operator=laplacian", "--out", out.string()})
            .code == kExitOk);
  const std::string csv = slurp(out / "filter.csv");
  CHECK(csv.rfind("row,col,re,im\n", 0) == 0);
  CHECK(run({"coarsen", "--graph", graph, "--out", out.string()}).code == kExitOk);
  CHECK(slurp(out / "limit.weights.tsv").find("\t10") != std::string::npos);
}

TEST_CASE("output directory precedence") {
  const fs::path env_dir = scratch("env");
  const fs::path flag_dir = scratch("flag");
  const std::string graph = holonet::testing::data_path("fig1.tsv").string();
  ::setenv("HOLONET_OUT_DIR", env_dir.c_str(), 1);
  CHECK(run({"reaches", "--graph", graph}).code == kExitOk);
  CHECK(fs::exists(env_dir / "reaches.txt"));
  CHECK(run({"reaches", "--graph", graph, "--out", flag_dir.string()}).code == kExitOk);
  CHECK(fs::exists(flag_dir / "reaches.txt"));
  ::unsetenv("HOLONET_OUT_DIR");
}
