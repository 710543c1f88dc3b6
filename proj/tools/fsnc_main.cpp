// fsnc: benchmark driver for few-shot node classification experiments.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "fsnc/datagen.hpp"
#include "fsnc/gradcheck_suite.hpp"
#include "fsnc/ingest.hpp"
#include "fsnc/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::array<int, 3> parse_sizes(const std::string& text) {
  std::array<int, 3> sizes{};
  std::istringstream in(text);
  std::string part;
  int i = 0;
  while (std::getline(in, part, ',')) {
    if (i >= 3) throw fsnc::FsncError("--splits expects three comma-separated sizes");
    sizes[static_cast<std::size_t>(i++)] = std::stoi(part);
  }
  if (i != 3) throw fsnc::FsncError("--splits expects three comma-separated sizes");
  return sizes;
}

int cmd_ingest(const std::string& content, const std::string& edges, const std::string& name,
               const std::string& splits, const std::string& out) {
  const auto sizes = parse_sizes(splits);
  const fsnc::IngestStats stats = fsnc::ingest_dataset(content, edges, name, sizes, out);
  std::cout << fsnc::format_stats_table(stats, sizes);
  std::cout << "wrote " << out << "\n";
  return 0;
}

json partition_manifest(const fsnc::SplitView& view) {
  json j;
  j["partition"] = fsnc::to_string(view.partition);
  j["setting"] = fsnc::to_string(view.setting);
  j["classes"] = view.class_ids;
  json nodes = json::array();
  for (int local : view.partition_nodes) {
    nodes.push_back(view.to_global[static_cast<std::size_t>(local)]);
  }
  j["n_nodes"] = nodes.size();
  j["n_edges"] = view.setting == fsnc::Setting::inductive ? view.graph->n_undirected_edges() : 0;
  if (view.setting == fsnc::Setting::transductive) j.erase("n_edges");
  j["node_ids"] = std::move(nodes);
  return j;
}

int cmd_split(const std::string& dataset, const std::string& setting_text, const std::string& seed_text,
              const std::string& sizes_text, const std::string& out) {
  fsnc::DatasetMeta meta;
  auto graph = std::make_shared<const fsnc::Graph>(fsnc::load_graph(dataset, &meta));
  const fsnc::Setting setting = fsnc::setting_from_string(setting_text);
  const fsnc::SplitSeed seed = fsnc::SplitSeed::parse(seed_text);

  std::array<int, 3> sizes{static_cast<int>(meta.class_split.train.size()),
                           static_cast<int>(meta.class_split.dev.size()),
                           static_cast<int>(meta.class_split.test.size())};
  if (!sizes_text.empty()) sizes = parse_sizes(sizes_text);

  const fsnc::ClassSplit split = fsnc::split_classes(*graph, sizes[0], sizes[1], sizes[2], seed);
  const fsnc::ViewSet views = fsnc::build_views(graph, split, setting);

  fs::create_directories(out);
  std::int64_t intra = 0;
  for (const fsnc::SplitView* view : {&views.train, &views.dev, &views.test}) {
    std::ofstream(fs::path(out) / (fsnc::to_string(view->partition) + ".json"))
        << partition_manifest(*view).dump(2) << "\n";
    if (setting == fsnc::Setting::inductive) intra += view->graph->n_undirected_edges();
  }

  const std::int64_t crossing = fsnc::count_cross_partition_edges(*graph, split);
  json audit;
  audit["dataset"] = dataset;
  audit["name"] = meta.name;
  audit["setting"] = setting_text;
  audit["seed"] = seed.to_string();
  audit["sizes"] = {sizes[0], sizes[1], sizes[2]};
  audit["total_edges"] = graph->n_undirected_edges();
  audit["cross_partition_edges"] = crossing;
  if (setting == fsnc::Setting::inductive) {
    audit["edges_removed"] = crossing;
    audit["edges_kept"] = intra;
  } else {
    audit["edges_removed"] = 0;
  }
  std::ofstream(fs::path(out) / "audit.json") << audit.dump(2) << "\n";

  std::cout << "split " << meta.name << " (" << setting_text << "): " << crossing
            << " cross-partition edges" << (setting == fsnc::Setting::inductive ? " removed" : " (kept)")
            << "\n";
  std::cout << "wrote " << out << "\n";
  return 0;
}

fsnc::RunConfig load_with_overrides(const std::string& config_path, int jobs_override,
                                    const std::string& out_override) {
  fsnc::RunConfig cfg = fsnc::load_run_config(config_path);
  if (jobs_override > 0) cfg.protocol.jobs = jobs_override;
  if (!out_override.empty()) cfg.out = out_override;
  return cfg;
}

int cmd_run(const std::string& config_path, int jobs_override, const std::string& out_override,
            bool dry_run) {
  fsnc::RunConfig cfg = load_with_overrides(config_path, jobs_override, out_override);
  if (dry_run) {
    const fsnc::RunConfig resolved = fsnc::validate_run(std::move(cfg));
    std::cout << "config ok: " << resolved.echo().dump() << "\n";
    return 0;
  }
  if (!cfg.out) {
    throw fsnc::FsncError("no output directory: set \"out\" in the config or pass --out");
  }
  const fsnc::RunOutcome outcome = fsnc::execute_run(std::move(cfg));
  const fsnc::ProtocolConfig& pc = outcome.resolved.protocol;
  std::cout << fsnc::to_string(pc.method.id) << " " << fsnc::to_string(pc.setting) << " "
            << pc.spec.n_way << "-way " << pc.spec.k_shot
            << "-shot: mean=" << outcome.report.mean_accuracy << " ci95=" << outcome.report.ci95
            << " (" << outcome.report.wall_seconds << "s)\n";
  std::cout << "wrote " << outcome.resolved.out->string() << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& n_list, const std::string& k_list,
              int jobs_override, const std::string& out_override) {
  const fsnc::RunConfig base = load_with_overrides(config_path, jobs_override, out_override);
  if (!base.out) {
    throw fsnc::FsncError("no output directory: set \"out\" in the config or pass --out");
  }

  auto parse_list = [](const std::string& text) {
    std::vector<int> out;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) out.push_back(std::stoi(part));
    if (out.empty()) throw fsnc::FsncError("expected a comma-separated integer list");
    return out;
  };

  std::vector<fsnc::SweepRow> rows;
  for (const int n : parse_list(n_list)) {
    for (const int k : parse_list(k_list)) {
      fsnc::RunConfig point = base;
      point.protocol.spec.n_way = n;
      point.protocol.spec.k_shot = k;
      point.out = *base.out / ("n" + std::to_string(n) + "_k" + std::to_string(k));
      const fsnc::RunOutcome outcome = fsnc::execute_run(std::move(point));
      rows.push_back({fsnc::to_string(base.protocol.method.id),
                      fsnc::to_string(base.protocol.setting), n, k, outcome.report.mean_accuracy,
                      outcome.report.ci95});
      std::cout << n << "-way " << k << "-shot: mean=" << outcome.report.mean_accuracy
                << " ci95=" << outcome.report.ci95 << "\n";
    }
  }
  fsnc::write_sweep_csv(*base.out / "sweep.csv", rows);
  std::cout << "wrote " << (*base.out / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_gradcheck(int instances, double h, double tol, std::uint64_t seed) {
  const auto reports = fsnc::run_gradcheck_suite(instances, h, tol, seed);
  std::cout << fsnc::format_gradcheck_report(reports);
  for (const auto& r : reports) {
    if (!r.ok()) return 1;
  }
  return 0;
}

int cmd_report(const std::string& in) {
  const json j = fsnc::read_run_report(in);
  const json& cfg = j.at("config");
  std::cout << "dataset:  " << cfg.at("dataset").get<std::string>() << "\n";
  std::cout << "method:   " << cfg.at("method").at("id").get<std::string>() << " ("
            << cfg.at("setting").get<std::string>() << ", "
            << cfg.at("protocol").at("n_way").get<int>() << "-way "
            << cfg.at("protocol").at("k_shot").get<int>() << "-shot, seed "
            << cfg.at("seed").get<std::uint64_t>() << ")\n";
  std::cout << "repeats:\n";
  for (const auto& r : j.at("repeats")) {
    std::cout << "  #" << r.at("repeat").get<int>() << "  test=" << r.at("test_accuracy").get<double>()
              << "  best_dev=" << r.at("best_val_accuracy").get<double>()
              << "  stop_epoch=" << r.at("stop_epoch").get<int>() << "\n";
  }
  std::cout << "mean=" << j.at("mean_accuracy").get<double>() << "  ci95=" << j.at("ci95").get<double>()
            << "  wall=" << j.at("wall_seconds").get<double>() << "s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"few-shot node classification benchmark"};
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest", "convert raw content/edge files into a dataset directory");
  std::string in_content, in_edges, in_name = "dataset", in_splits, in_out;
  ingest->add_option("--content", in_content, "feature table: id, d values, label per line")->required();
  ingest->add_option("--edges", in_edges, "edge list: two ids per line")->required();
  ingest->add_option("--name", in_name, "dataset name");
  ingest->add_option("--splits", in_splits, "class split sizes, e.g. 3,2,2")->required();
  ingest->add_option("--out", in_out, "output dataset directory")->required();

  auto* split = app.add_subcommand("split", "materialize class partitions and an edge-cut audit");
  std::string sp_dataset, sp_setting, sp_seed = "fixed", sp_sizes, sp_out;
  split->add_option("--dataset", sp_dataset, "dataset directory")->required();
  split->add_option("--setting", sp_setting, "transductive or inductive")->required();
  split->add_option("--seed", sp_seed, "u64 or \"fixed\"");
  split->add_option("--sizes", sp_sizes, "override split sizes, e.g. 3,2,2");
  split->add_option("--out", sp_out, "output directory")->required();

  auto* runcmd = app.add_subcommand("run", "run the evaluation protocol from a config file");
  std::string run_config, run_out;
  int run_jobs = 0;
  bool run_dry = false;
  runcmd->add_option("--config", run_config, "run config (JSON)")->required();
  runcmd->add_option("--jobs", run_jobs, "parallel workers for repeats/evaluation");
  runcmd->add_option("--out", run_out, "override the output directory");
  runcmd->add_flag("--dry-run", run_dry, "validate config and views, then exit");

  auto* sweep = app.add_subcommand("sweep", "cross product of N-way/K-shot runs, long-form CSV");
  std::string sw_config, sw_n, sw_k, sw_out;
  int sw_jobs = 0;
  sweep->add_option("--config", sw_config, "run config (JSON)")->required();
  sweep->add_option("--n", sw_n, "comma-separated N values, e.g. 2,5")->required();
  sweep->add_option("--k", sw_k, "comma-separated K values, e.g. 1,3,5")->required();
  sweep->add_option("--jobs", sw_jobs, "parallel workers");
  sweep->add_option("--out", sw_out, "override the output directory");

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference checks for all gradient paths");
  int gc_instances = 20;
  double gc_h = 1e-5, gc_tol = 1e-4;
  std::uint64_t gc_seed = 0;
  gradcheck->add_option("--instances", gc_instances, "random instances per path");
  gradcheck->add_option("--fd-step", gc_h, "central-difference step");
  gradcheck->add_option("--tol", gc_tol, "max relative error");
  gradcheck->add_option("--seed", gc_seed, "instance seed");

  auto* report = app.add_subcommand("report", "pretty-print a report.json");
  std::string rp_in;
  report->add_option("--in", rp_in, "report.json or its directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) return cmd_ingest(in_content, in_edges, in_name, in_splits, in_out);
    if (split->parsed()) return cmd_split(sp_dataset, sp_setting, sp_seed, sp_sizes, sp_out);
    if (runcmd->parsed()) return cmd_run(run_config, run_jobs, run_out, run_dry);
    if (sweep->parsed()) return cmd_sweep(sw_config, sw_n, sw_k, sw_jobs, sw_out);
    if (gradcheck->parsed()) return cmd_gradcheck(gc_instances, gc_h, gc_tol, gc_seed);
    if (report->parsed()) return cmd_report(rp_in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
