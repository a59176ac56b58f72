#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hermite_nc/experiment.hpp"

using namespace hermite_nc;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

#ifdef TEST_CLI_BINARY
int run_cli(const std::string& args) {
  const int status = std::system((std::string(TEST_CLI_BINARY) + " " + args +
                                  " > /dev/null 2>&1")
                                     .c_str());
  return WEXITSTATUS(status);
}
#endif

}  // namespace

TEST_CASE("config serialization round trip is the identity") {
  ExperimentConfig cfg;
  cfg.kind = "mehler-probe";
  cfg.t_values = {0.1, 0.5, 1.0};
  cfg.x_values = {-1.5, 0.0, 0.7};
  cfg.seed = 9;
  cfg.output_dir = "/tmp/hermite-nc-test/roundtrip";
  const ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
  CHECK(back == cfg);
  CHECK(ExperimentConfig::from_json(back.to_json()) == back);
  // defaults survive a trip through json too
  const ExperimentConfig def;
  CHECK(ExperimentConfig::from_json(def.to_json()) == def);
}

TEST_CASE("config parsing rejects malformed input") {
  nlohmann::json j = ExperimentConfig().to_json();
  j["not_a_field"] = 1;
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);

  nlohmann::json bad_type = ExperimentConfig().to_json();
  bad_type["degree_cap"] = "many";
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad_type), ConfigError);

  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::array()),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config validation pins the experiment preconditions") {
  ExperimentConfig cfg;
  cfg.kind = "not-an-experiment";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = ExperimentConfig();
  cfg.kind = "mehler-probe";
  cfg.x_values.clear();  // probe needs lattice points
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = ExperimentConfig();
  cfg.kind = "norm-equivalence";
  cfg.p_values = {0.5};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = ExperimentConfig();
  cfg.kind = "marcinkiewicz";
  cfg.n_max = 4;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = ExperimentConfig();
  cfg.kind = "riesz-convergence";
  cfg.dim = 9;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("identical runs produce byte-identical results") {
  ExperimentConfig cfg;
  cfg.kind = "mehler-probe";
  cfg.seed = 4;
  for (int pass = 0; pass < 2; ++pass) {
    cfg.output_dir = "/tmp/hermite-nc-test/det" + std::to_string(pass);
    const RunResult res = run(cfg);
    CHECK(res.exit_code == 0);
  }
  CHECK(slurp("/tmp/hermite-nc-test/det0/results.csv") ==
        slurp("/tmp/hermite-nc-test/det1/results.csv"));
  // header + sorted rows
  const std::string csv = slurp("/tmp/hermite-nc-test/det0/results.csv");
  CHECK(csv.rfind("experiment,parameters,metric,value\n", 0) == 0);
  // the json report carries the config and the probe verdicts
  const nlohmann::json rep =
      nlohmann::json::parse(slurp("/tmp/hermite-nc-test/det0/report.json"));
  cfg.output_dir = "/tmp/hermite-nc-test/det0";
  CHECK(ExperimentConfig::from_json(rep.at("config")) == cfg);
  REQUIRE(!rep.at("reports").empty());
  CHECK(rep.at("reports")[0].at("pass").get<bool>());
}

TEST_CASE("failing batteries set the exit code") {
  ExperimentConfig cfg;
  cfg.kind = "marcinkiewicz";
  cfg.multiplier = "parity";
  cfg.output_dir = "/tmp/hermite-nc-test/parity";
  const RunResult bad = run(cfg);
  CHECK(bad.exit_code == 1);

  cfg.multiplier = "power";
  cfg.output_dir = "/tmp/hermite-nc-test/power";
  CHECK(run(cfg).exit_code == 0);
}

TEST_CASE("summary table") {
  std::ostringstream empty;
  CHECK(emit_summary({}, empty) == 0);
  CHECK(empty.str() == "no probes\n");

  ProbeReport ok;
  ok.name = "ok-probe";
  ok.slices.push_back({"a", 1.0, {}});
  ok.finalize();
  ProbeReport failing = marcinkiewicz_report(MultiplierSpec::parity(), 2, 1024);
  std::ostringstream os;
  CHECK(emit_summary({ok, failing}, os) == 1);
  CHECK(os.str().find("PASS") != std::string::npos);
  CHECK(os.str().find("FAIL") != std::string::npos);
}

#ifdef TEST_CLI_BINARY

TEST_CASE("command line exit codes") {
  CHECK(run_cli("") == 2);                       // usage error
  CHECK(run_cli("run") == 2);                    // missing config path
  CHECK(run_cli("run /nonexistent.json") == 2);  // unreadable config
  CHECK(run_cli("--help") == 0);

  {
    std::ofstream bad("/tmp/hermite-nc-test/bad.json");
    bad << "{ not json";
  }
  CHECK(run_cli("run /tmp/hermite-nc-test/bad.json") == 2);

  {
    std::ofstream unknown("/tmp/hermite-nc-test/unknown.json");
    unknown << R"({"kind": "mystery-experiment"})";
  }
  CHECK(run_cli("run /tmp/hermite-nc-test/unknown.json") == 2);

  ExperimentConfig cfg;
  cfg.kind = "mehler-probe";
  {
    std::ofstream good("/tmp/hermite-nc-test/good.json");
    good << cfg.to_json().dump(2);
  }
  CHECK(run_cli("run /tmp/hermite-nc-test/good.json --out "
                "/tmp/hermite-nc-test/cli-out --seed 7") == 0);
  CHECK(slurp("/tmp/hermite-nc-test/cli-out/results.csv").size() > 0);

  ExperimentConfig parity;
  parity.kind = "marcinkiewicz";
  parity.multiplier = "parity";
  {
    std::ofstream f("/tmp/hermite-nc-test/parity.json");
    f << parity.to_json().dump(2);
  }
  CHECK(run_cli("run /tmp/hermite-nc-test/parity.json --out "
                "/tmp/hermite-nc-test/cli-parity") == 1);  // probe failure
}

#endif
