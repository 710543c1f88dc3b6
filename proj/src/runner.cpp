#include "fsnc/runner.hpp"

namespace fsnc {

namespace {

struct Prepared {
  RunConfig config;
  std::shared_ptr<const Graph> graph;
  ClassSplit split;
};

Prepared prepare(RunConfig cfg) {
  Prepared p;
  DatasetMeta meta;
  p.graph = std::make_shared<const Graph>(load_graph(cfg.dataset, &meta));
  std::array<int, 3> sizes{static_cast<int>(meta.class_split.train.size()),
                           static_cast<int>(meta.class_split.dev.size()),
                           static_cast<int>(meta.class_split.test.size())};
  if (cfg.split_sizes) sizes = *cfg.split_sizes;
  cfg.split_sizes = sizes;  // resolved sizes go into the config echo
  p.split = split_classes(*p.graph, sizes[0], sizes[1], sizes[2], cfg.split_seed);
  p.config = std::move(cfg);
  return p;
}

}  // namespace

RunConfig validate_run(RunConfig cfg) {
  Prepared p = prepare(std::move(cfg));
  const ViewSet views = build_views(p.graph, p.split, p.config.protocol.setting);
  check_view_feasibility(views, p.config.protocol);
  return std::move(p.config);
}

RunOutcome execute_run(RunConfig cfg) {
  Prepared p = prepare(std::move(cfg));
  RunOutcome out;
  out.report = run_protocol(p.graph, p.split, p.config.protocol,
                            p.config.save_checkpoints ? &out.best_params : nullptr);
  out.resolved = std::move(p.config);
  if (out.resolved.out) {
    write_run_report(*out.resolved.out, out.resolved, out.report);
    for (std::size_t i = 0; i < out.best_params.size(); ++i) {
      save_params(out.best_params[i],
                  *out.resolved.out / ("params_repeat" + std::to_string(i) + ".json"));
    }
  }
  return out;
}

}  // namespace fsnc
