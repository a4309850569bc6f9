#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ipp/cli.hpp"
#include "ipp/path.hpp"
#include "ipp/trading.hpp"
#include "json.hpp"

using namespace ipp;
using nlohmann::json;

namespace {

struct RunResult {
  int status;
  std::string out;
  std::string err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = run_command(args, out, err);
  return RunResult{status, out.str(), err.str()};
}

}  // namespace

TEST_CASE("renewal subcommand emits the closed form") {
  RunResult r = run({"renewal", "--rates", "0.5,2"});
  CHECK(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["lower"].get<double>() == doctest::Approx(0.5));
  CHECK(j["upper"].get<double>() == doctest::Approx(2.0));

  RunResult inf_case = run({"renewal", "--rates", "0,1"});
  CHECK(inf_case.status == 0);
  json ji = json::parse(inf_case.out);
  CHECK(ji["lower"].get<double>() == doctest::Approx(1.0));
  CHECK(ji["upper"].get<std::string>() == "inf");
}

TEST_CASE("malformed rates exit with a validation error") {
  RunResult r = run({"expect", "--rates", "2,0.5", "--variable",
                     R"({"times":[1.0],"payoff":{"kind":"indicator","target":[0]}})"});
  CHECK(r.status == 2);
  CHECK(r.err.find("lower exceeds upper") != std::string::npos);
}

TEST_CASE("unknown subcommands print usage and exit 2") {
  RunResult r = run({"frobnicate"});
  CHECK(r.status == 2);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("expect subcommand prices the no-jump indicator") {
  RunResult r = run({"expect", "--rates", "1,2", "--variable",
                     R"({"times":[1.0],"payoff":{"kind":"indicator","target":[0]}})", "--mode",
                     "upper"});
  CHECK(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["value"].get<double>() == doctest::Approx(std::exp(-1.0)).epsilon(1e-5));
  CHECK(j["mode"] == "upper");
  CHECK(j["error_bound"].get<double>() < 1.0);

  RunResult lower = run({"expect", "--rates", "1,2", "--variable",
                         R"({"times":[1.0],"payoff":{"kind":"indicator","target":[0]}})",
                         "--mode", "lower"});
  json jl = json::parse(lower.out);
  CHECK(jl["value"].get<double>() == doctest::Approx(std::exp(-2.0)).epsilon(1e-5));
}

TEST_CASE("expect honors a conditioning prefix") {
  RunResult r = run({"expect", "--rates", "1,2", "--variable",
                     R"({"times":[0.5,1.0],"payoff":{"kind":"capped_increment","cap":10}})",
                     "--prefix", R"({"observed":[{"time":0.5,"count":1},{"time":1.0,"count":4}]})"});
  CHECK(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["value"].get<double>() == doctest::Approx(3.0));
  CHECK(j["error_bound"].get<double>() == 0.0);
}

TEST_CASE("semigroup subcommand with the indicator shorthand") {
  RunResult r = run({"semigroup", "--delta", "1", "--rates", "1,2", "--payoff", "indicator:0",
                     "--mode", "upper"});
  CHECK(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["values"]["0"].get<double>() == doctest::Approx(0.367879441171).epsilon(1e-6));
  CHECK(j.contains("error_bound"));

  RunResult flags = run({"semigroup", "--delta", "1", "--lambda-lo", "1", "--lambda-hi", "2",
                         "--payoff", "indicator:0", "--mode", "upper"});
  CHECK(flags.status == 0);
  CHECK(json::parse(flags.out)["values"]["0"].get<double>() ==
        doctest::Approx(0.367879441171).epsilon(1e-6));
}

TEST_CASE("simulate is byte-stable and supports csv") {
  const std::vector<std::string> args{"simulate", "--rate", "1.5", "--horizon", "3",
                                      "--seed", "7"};
  RunResult a = run(args);
  RunResult b = run(args);
  CHECK(a.status == 0);
  CHECK(a.out == b.out);  // identical argv + seed => byte-identical output

  json j = json::parse(a.out);
  CountingPath path = path_from_json(a.out);
  CHECK(path.horizon() == doctest::Approx(3.0));

  RunResult csv = run({"simulate", "--rate", "1.5", "--horizon", "3", "--seed", "7",
                       "--format", "csv"});
  CHECK(csv.out.rfind("index,jump_time\n", 0) == 0);
}

TEST_CASE("emitted json re-parses to the same values") {
  RunResult r = run({"expect", "--rates", "0.5,1.5", "--variable",
                     R"({"times":[0.7],"payoff":{"kind":"capped_count","cap":20}})"});
  CHECK(r.status == 0);
  json first = json::parse(r.out);
  json second = json::parse(first.dump());
  CHECK(first == second);
}

TEST_CASE("superhedge output feeds the coherence falsifier") {
  RunResult hedge = run({"superhedge", "--rates", "1,2", "--payoff", "indicator:0", "--s", "0",
                         "--t", "1", "--n", "64"});
  CHECK(hedge.status == 0);
  json jh = json::parse(hedge.out);
  CHECK(jh["grid"]["cells"].get<long>() == 64);
  CHECK(jh["ladder"].size() == 65);

  json ledger;
  ledger["initial"] = jh["initial_capital"];
  ledger["strategies"] = json::array({jh["strategy"]});

  RunResult falsified = run({"coherence", "--strategy", ledger.dump(), "--path",
                             R"({"horizon":1.0,"jumps":[]})", "--t", "0.25", "--epsilon",
                             "0.001"});
  CHECK(falsified.status == 0);
  json jf = json::parse(falsified.out);
  CHECK(jf["settlement_capital"].get<double>() <
        jf["capital_at_cut"].get<double>() + 0.001);
}

TEST_CASE("oracle subcommand brackets the engine") {
  RunResult r = run({"oracle", "--rates", "1,2", "--variable",
                     R"({"times":[0.8],"payoff":{"kind":"indicator","target":[0]}})",
                     "--samples", "20000", "--seed", "3", "--grid", "1,1.5,2", "--tol", "1e-5"});
  CHECK(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["verdict"] == "ok");
  CHECK(j["envelope"].get<double>() <=
        j["engine_value"].get<double>() + j["engine_error_bound"].get<double>() + 1e-9);

  RunResult bad_grid = run({"oracle", "--rates", "1,2", "--variable",
                            R"({"times":[0.8],"payoff":{"kind":"indicator","target":[0]}})",
                            "--samples", "100", "--grid", "0.5"});
  CHECK(bad_grid.status == 2);
}

TEST_CASE("budget violations exit with the resource status") {
  RunResult r = run({"expect", "--rates", "1,2", "--variable",
                     R"({"times":[1.0],"payoff":{"kind":"indicator","target":[0]}})", "--tol",
                     "1e-15"});
  CHECK(r.status == 3);
  CHECK(r.err.find("resource") != std::string::npos);
}

TEST_CASE("help is available") {
  RunResult r = run({"--help"});
  CHECK(r.status == 0);
  CHECK(r.out.find("expect") != std::string::npos);
}

TEST_CASE("IPP_CONFIG supplies defaults that flags can override") {
  {
    std::ofstream cfg("/tmp/ipp_config_test.json");
    cfg << R"({"rates": "0.5,2", "tol": 1e-5})";
  }
  setenv("IPP_CONFIG", "/tmp/ipp_config_test.json", 1);
  RunResult defaulted = run({"renewal"});
  CHECK(defaulted.status == 0);
  json j = json::parse(defaulted.out);
  CHECK(j["lower"].get<double>() == doctest::Approx(0.5));

  RunResult overridden = run({"renewal", "--rates", "1,4"});
  CHECK(json::parse(overridden.out)["lower"].get<double>() == doctest::Approx(0.25));

  setenv("IPP_CONFIG", "/tmp/ipp_config_missing.json", 1);
  CHECK(run({"renewal", "--rates", "1,4"}).status == 2);
  unsetenv("IPP_CONFIG");
}
