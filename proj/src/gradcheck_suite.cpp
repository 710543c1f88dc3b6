#include "fsnc/gradcheck_suite.hpp"

#include <memory>
#include <sstream>

#include "fsnc/methods.hpp"

namespace fsnc {

namespace {

Graph random_instance_graph(RngStream& rng, int n_classes) {
  const int n = n_classes + 2 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(28 - n_classes)));
  const int d = 2 + static_cast<int>(rng.bounded(9));  // <= 10
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    labels[static_cast<std::size_t>(i)] =
        i < n_classes ? i : static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n_classes)));
  }
  rng.shuffle(labels);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.next_double() < 0.2) edges.emplace_back(u, v);
    }
  }
  DenseMatrix feats(n, d);
  for (double& v : feats.values) v = rng.uniform(-1.0, 1.0);
  return make_graph(n, n_classes, edges, FeatureMatrix(std::move(feats)), std::move(labels));
}

void accumulate(GradPathReport& report, const GradCheckReport& check) {
  report.instances += 1;
  report.coordinates_checked += check.coordinates_checked;
  report.max_error = std::max(report.max_error, check.max_error);
  report.violations += static_cast<int>(check.violations.size());
}

GradPathReport check_encoder_head_path(Backbone backbone, int instances, double h, double tol,
                                       RngStream& rng) {
  GradPathReport report;
  report.path = backbone == Backbone::gcn ? "gcn_encoder_head" : "mlp_encoder_head";
  for (int i = 0; i < instances; ++i) {
    const int n_classes = 2 + static_cast<int>(rng.bounded(3));
    const Graph g = random_instance_graph(rng, n_classes);
    const NormalizedAdjacency norm = gcn_normalize(g);
    const int hidden = 3 + static_cast<int>(rng.bounded(4));
    const int embed = 2 + static_cast<int>(rng.bounded(3));

    ParamSet params = init_encoder_params(g.n_features(), hidden, embed, rng);
    {
      ParamSet head = init_head_params(embed, n_classes, rng);
      params.add(kHeadW, std::move(head.at(kHeadW)));
      params.add(kHeadB, std::move(head.at(kHeadB)));
    }

    const auto loss_fn = [&](const ParamSet& p) {
      const DenseMatrix z = backbone == Backbone::gcn ? gcn_forward(norm.matrix, g.features, p)
                                                      : mlp_forward(g.features, p);
      return softmax_ce(classify(z, p), g.labels).loss;
    };

    EncoderCache cache;
    const DenseMatrix z = backbone == Backbone::gcn
                              ? gcn_forward(norm.matrix, g.features, params, &cache)
                              : mlp_forward(g.features, params, &cache);
    const CeResult ce = softmax_ce(classify(z, params), g.labels);
    HeadBackward hb = classify_backward(z, params, ce.grad_logits);
    GradSet grads = backbone == Backbone::gcn
                        ? gcn_backward(norm.matrix, g.features, params, cache, hb.grad_embeddings)
                        : mlp_backward(g.features, params, cache, hb.grad_embeddings);
    grads.add(kHeadW, std::move(hb.head_grads.at(kHeadW)));
    grads.add(kHeadB, std::move(hb.head_grads.at(kHeadB)));

    accumulate(report, grad_check(loss_fn, params, grads, h, tol, 200, rng));
  }
  return report;
}

GradPathReport check_probe_path(int instances, double h, double tol, RngStream& rng) {
  GradPathReport report;
  report.path = "linear_probe_head";
  for (int i = 0; i < instances; ++i) {
    const int n_way = 2 + static_cast<int>(rng.bounded(3));
    const int k_shot = 1 + static_cast<int>(rng.bounded(3));
    const int embed = 2 + static_cast<int>(rng.bounded(5));
    DenseMatrix emb(n_way * k_shot, embed);
    for (double& v : emb.values) v = rng.uniform(-1.0, 1.0);
    std::vector<int> labels;
    for (int c = 0; c < n_way; ++c) {
      for (int k = 0; k < k_shot; ++k) labels.push_back(c);
    }

    ParamSet head = init_head_params(embed, n_way, rng);
    const auto loss_fn = [&](const ParamSet& p) {
      return softmax_ce(classify(emb, p), labels).loss;
    };
    const CeResult ce = softmax_ce(classify(emb, head), labels);
    const HeadBackward hb = classify_backward(emb, head, ce.grad_logits);

    accumulate(report, grad_check(loss_fn, head, hb.head_grads, h, tol, 200, rng));
  }
  return report;
}

GradPathReport check_protonet_path(int instances, double h, double tol, RngStream& rng) {
  GradPathReport report;
  report.path = "protonet_distance";
  for (int i = 0; i < instances; ++i) {
    auto g = std::make_shared<const Graph>(random_instance_graph(rng, 4));
    const ClassSplit split{{0, 1}, {2}, {3}};
    const SplitView view = build_view(g, split, Setting::transductive, Partition::train);

    MethodConfig cfg;
    cfg.id = MethodId::protonet;
    cfg.backbone = Backbone::mlp;
    cfg.hidden = 3 + static_cast<int>(rng.bounded(4));
    cfg.embedding = 2 + static_cast<int>(rng.bounded(3));
    const ParamSet params = init_encoder_params(g->n_features(), cfg.hidden, cfg.embedding, rng);

    EpisodeSpec spec{2, 1, 1};
    // keep K+Q feasible on small random class buckets
    int smallest = g->n_nodes;
    for (const auto& [cls, nodes] : view.nodes_by_class) {
      smallest = std::min(smallest, static_cast<int>(nodes.size()));
    }
    if (smallest < 2) {
      --i;
      continue;
    }
    spec.k_shot = 1;
    spec.q_query = std::min(2, smallest - 1);
    RngStream episode_rng = RngStream::substream(rng.next_u64(), 0);
    const Episode ep = sample_episode(view, spec, episode_rng);

    GradSet grads;
    protonet_episode(view, ep, params, cfg, &grads, nullptr);
    const auto loss_fn = [&](const ParamSet& p) {
      return protonet_episode(view, ep, p, cfg, nullptr, nullptr);
    };
    accumulate(report, grad_check(loss_fn, params, grads, h, tol, 200, rng));
  }
  return report;
}

}  // namespace

std::vector<GradPathReport> run_gradcheck_suite(int instances, double h, double tol,
                                                std::uint64_t seed) {
  RngStream rng(mix_seed({seed, 0x67726164ULL}));
  std::vector<GradPathReport> reports;
  reports.push_back(check_encoder_head_path(Backbone::gcn, instances, h, tol, rng));
  reports.push_back(check_encoder_head_path(Backbone::mlp, instances, h, tol, rng));
  reports.push_back(check_probe_path(instances, h, tol, rng));
  reports.push_back(check_protonet_path(instances, h, tol, rng));
  return reports;
}

std::string format_gradcheck_report(const std::vector<GradPathReport>& reports) {
  std::ostringstream out;
  for (const auto& r : reports) {
    out << (r.ok() ? "PASS" : "FAIL") << "  " << r.path << "  instances=" << r.instances
        << "  coords=" << r.coordinates_checked << "  max_err=" << r.max_error
        << "  violations=" << r.violations << "\n";
  }
  return out.str();
}

}  // namespace fsnc
