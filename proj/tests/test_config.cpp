#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "fsnc/config.hpp"
#include "fsnc/report.hpp"
#include "helpers.hpp"

using namespace fsnc;
using namespace fsnc::testing;

namespace {

nlohmann::json base_config(const std::filesystem::path& dataset) {
  return nlohmann::json{
      {"schema_version", 1},
      {"dataset", dataset.string()},
      {"setting", "inductive"},
      {"split", {{"sizes", {3, 2, 2}}, {"seed", "fixed"}}},
      {"method", {{"id", "protonet"}}},
      {"protocol",
       {{"eval_interval", 5}, {"tasks_per_eval", 10}, {"patience", 2}, {"max_epochs", 20},
        {"repeats", 2}, {"n_way", 2}, {"k_shot", 1}, {"q_query", 3}}},
      {"seed", 7},
  };
}

}  // namespace

TEST_CASE("run config parses with defaults materialized") {
  TempDir tmp("cfg");
  const RunConfig cfg = parse_run_config(base_config(tmp.path()), "test");
  CHECK(cfg.protocol.setting == Setting::inductive);
  CHECK(cfg.protocol.method.id == MethodId::protonet);
  CHECK(cfg.protocol.method.backbone == Backbone::mlp);  // defaulted by method id
  CHECK(cfg.protocol.spec.n_way == 2);
  CHECK(cfg.protocol.master_seed == 7);
  CHECK(cfg.split_sizes.has_value());
  CHECK((*cfg.split_sizes)[0] == 3);

  const nlohmann::json echo = cfg.echo();
  CHECK(echo.at("method").at("backbone") == "mlp");
  CHECK(echo.at("method").at("probe_steps") == 300);
  CHECK(echo.at("seed") == 7);
}

TEST_CASE("unknown keys are rejected at every level") {
  TempDir tmp("cfg2");
  auto j = base_config(tmp.path());
  j["surprise"] = 1;
  CHECK_THROWS_WITH_AS(parse_run_config(j, "test"), doctest::Contains("surprise"), FsncError);

  j = base_config(tmp.path());
  j["method"]["learning_rate_typo"] = 0.1;
  CHECK_THROWS_WITH_AS(parse_run_config(j, "test"), doctest::Contains("learning_rate_typo"), FsncError);

  j = base_config(tmp.path());
  j["protocol"]["EI"] = 10;
  CHECK_THROWS_WITH_AS(parse_run_config(j, "test"), doctest::Contains("EI"), FsncError);
}

TEST_CASE("missing dataset path is rejected") {
  auto j = base_config("/definitely/not/here");
  CHECK_THROWS_WITH_AS(parse_run_config(j, "test"), doctest::Contains("does not exist"), FsncError);
}

TEST_CASE("invalid method/backbone combinations are rejected") {
  TempDir tmp("cfg3");
  auto j = base_config(tmp.path());
  j["method"]["backbone"] = "gcn";  // protonet is per-node
  CHECK_THROWS_AS(parse_run_config(j, "test"), FsncError);
}

TEST_CASE("FSNC_SEED overrides the configured seed") {
  TempDir tmp("cfg4");
  ::setenv("FSNC_SEED", "424242", 1);
  const RunConfig cfg = parse_run_config(base_config(tmp.path()), "test");
  ::unsetenv("FSNC_SEED");
  CHECK(cfg.protocol.master_seed == 424242);
  CHECK(cfg.seed_from_env);
  CHECK(cfg.echo().at("seed") == 424242);

  ::setenv("FSNC_SEED", "not_a_number", 1);
  CHECK_THROWS_AS(parse_run_config(base_config(tmp.path()), "test"), FsncError);
  ::unsetenv("FSNC_SEED");
}

TEST_CASE("config file loader reports JSON errors with the path") {
  TempDir tmp("cfg5");
  const auto path = tmp.path() / "bad.json";
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_WITH_AS(load_run_config(path), doctest::Contains("bad.json"), FsncError);
  CHECK_THROWS_AS(load_run_config(tmp.path() / "missing.json"), FsncError);
}

TEST_CASE("report files carry the resolved config and per-repeat rows") {
  TempDir tmp("report");
  RunConfig cfg = parse_run_config(base_config(tmp.path()), "test");
  cfg.out = tmp.path() / "run";

  RunReport report;
  report.repeats = {{0, 0.75, 0.8, 40}, {1, 0.7016, 0.74, 60}};
  report.mean_accuracy = (0.75 + 0.7016) / 2.0;
  report.ci95 = 0.01;
  report.wall_seconds = 1.5;
  write_run_report(*cfg.out, cfg, report);

  const nlohmann::json back = read_run_report(*cfg.out);
  CHECK(back.at("config").at("seed") == 7);
  CHECK(back.at("repeats").size() == 2);
  CHECK(back.at("repeats")[1].at("test_accuracy") == 0.7016);

  std::ifstream csv(*cfg.out / "report.csv");
  std::string header, row0, row1;
  std::getline(csv, header);
  std::getline(csv, row0);
  std::getline(csv, row1);
  CHECK(header ==
        "method,setting,n_way,k_shot,q_query,seed,repeat,test_accuracy,best_val_accuracy,stop_epoch");
  CHECK(row0.find("protonet,inductive,2,1,3,7,0,0.75") == 0);
  CHECK(row1.find("stop") == std::string::npos);
  // wall-clock never appears in the CSV
  CHECK(header.find("wall") == std::string::npos);
}

TEST_CASE("sweep rows serialize in long form") {
  TempDir tmp("sweep");
  const auto path = tmp.path() / "sweep.csv";
  write_sweep_csv(path, {{"ignn", "inductive", 2, 1, 0.62, 0.02}, {"ignn", "inductive", 2, 5, 0.70, 0.02}});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "method,setting,n_way,k_shot,mean_accuracy,ci95");
  std::getline(in, line);
  CHECK(line.find("ignn,inductive,2,1,0.62") == 0);
}
