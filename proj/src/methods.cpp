#include "fsnc/methods.hpp"

#include <algorithm>
#include <cmath>

namespace fsnc {

std::string to_string(MethodId m) {
  switch (m) {
    case MethodId::ignn: return "ignn";
    case MethodId::protonet: return "protonet";
    case MethodId::maml: return "maml";
    default: return "meta_gnn";
  }
}

MethodId method_from_string(const std::string& s) {
  if (s == "ignn") return MethodId::ignn;
  if (s == "protonet") return MethodId::protonet;
  if (s == "maml") return MethodId::maml;
  if (s == "meta_gnn") return MethodId::meta_gnn;
  throw FsncError("unknown method: \"" + s + "\" (expected ignn, protonet, maml or meta_gnn)");
}

Backbone MethodConfig::default_backbone(MethodId id) {
  return (id == MethodId::ignn || id == MethodId::meta_gnn) ? Backbone::gcn : Backbone::mlp;
}

void MethodConfig::validate() const {
  if (backbone != default_backbone(id)) {
    throw FsncError("method " + to_string(id) + " requires the " +
                    fsnc::to_string(default_backbone(id)) + " backbone");
  }
  if (hidden < 1 || embedding < 1) throw FsncError("encoder dimensions must be positive");
  if (inner_steps < 0 || probe_steps < 0) throw FsncError("step counts must be non-negative");
}

namespace {

std::vector<int> episode_nodes(const Episode& ep) {
  std::vector<int> nodes;
  nodes.reserve(ep.support.size() + ep.query.size());
  for (const auto& [node, label] : ep.support) nodes.push_back(node);
  for (const auto& [node, label] : ep.query) nodes.push_back(node);
  return nodes;
}

std::vector<int> support_nodes(const Episode& ep) {
  std::vector<int> nodes;
  nodes.reserve(ep.support.size());
  for (const auto& [node, label] : ep.support) nodes.push_back(node);
  return nodes;
}

std::vector<int> query_nodes(const Episode& ep) {
  std::vector<int> nodes;
  nodes.reserve(ep.query.size());
  for (const auto& [node, label] : ep.query) nodes.push_back(node);
  return nodes;
}

std::vector<int> labels_of(const std::vector<std::pair<int, int>>& pairs) {
  std::vector<int> labels;
  labels.reserve(pairs.size());
  for (const auto& [node, label] : pairs) labels.push_back(label);
  return labels;
}

int episode_n_way(const Episode& ep) { return static_cast<int>(ep.class_map.size()); }

EpisodeResult result_from_logits(const DenseMatrix& logits, const std::vector<int>& labels) {
  EpisodeResult res;
  res.predictions.reserve(static_cast<std::size_t>(logits.rows));
  int correct = 0;
  for (int i = 0; i < logits.rows; ++i) {
    const auto row = logits.row(i);
    int best = 0;
    for (int j = 1; j < logits.cols; ++j) {
      if (row[static_cast<std::size_t>(j)] > row[static_cast<std::size_t>(best)]) best = j;
    }
    res.predictions.push_back(best);
    if (best == labels[static_cast<std::size_t>(i)]) ++correct;
  }
  res.accuracy = static_cast<double>(correct) / static_cast<double>(logits.rows);
  return res;
}

GradSet merge_grads(GradSet encoder, GradSet head) {
  GradSet out = std::move(encoder);
  for (std::size_t i = 0; i < head.size(); ++i) {
    out.add(head.name(i), std::move(head.tensor(i)));
  }
  return out;
}

}  // namespace

ParamSet init_method_params(const MethodConfig& cfg, int in_dim, int n_train_classes, int n_way,
                            std::uint64_t seed) {
  RngStream rng(seed);
  ParamSet params = init_encoder_params(in_dim, cfg.hidden, cfg.embedding, rng);
  if (cfg.id == MethodId::ignn) {
    ParamSet head = init_head_params(cfg.embedding, n_train_classes, rng);
    return merge_grads(std::move(params), std::move(head));
  }
  if (cfg.id == MethodId::maml || cfg.id == MethodId::meta_gnn) {
    ParamSet head = init_head_params(cfg.embedding, n_way, rng);
    return merge_grads(std::move(params), std::move(head));
  }
  return params;  // protonet: encoder only
}

DenseMatrix embed_view(const SplitView& view, Backbone backbone, const ParamSet& params) {
  if (backbone == Backbone::gcn) {
    return gcn_forward(view.normalized->matrix, view.graph->features, params);
  }
  return mlp_forward(view.graph->features, params);
}

EpisodeEncoder::EpisodeEncoder(const SplitView& view, std::vector<int> nodes, Backbone backbone,
                               const ParamSet& params)
    : view_(view), nodes_(std::move(nodes)), backbone_(backbone), params_(params) {
  if (backbone_ == Backbone::mlp) {
    gathered_ = view_.graph->features.gather(nodes_);
    embeddings_ = mlp_forward(gathered_, params_, &cache_);
  } else {
    const DenseMatrix full = gcn_forward(view_.normalized->matrix, view_.graph->features, params_, &cache_);
    embeddings_ = gather_rows(full, nodes_);
  }
}

GradSet EpisodeEncoder::backward(const DenseMatrix& grad_rows) const {
  if (backbone_ == Backbone::mlp) {
    return mlp_backward(gathered_, params_, cache_, grad_rows);
  }
  const DenseMatrix grad_full = scatter_rows(grad_rows, nodes_, view_.graph->n_nodes);
  return gcn_backward(view_.normalized->matrix, view_.graph->features, params_, cache_, grad_full);
}

// --- I-GNN -----------------------------------------------------------------

double ignn_pretrain_epoch(const SplitView& train_view, const MethodConfig& cfg, ParamSet& params,
                           OptimizerState& opt) {
  if (train_view.partition_nodes.empty()) throw FsncError("ignn_pretrain: empty train view");

  // remap partition classes (ascending) to 0..C-1
  std::vector<int> targets;
  targets.reserve(train_view.partition_nodes.size());
  for (int node : train_view.partition_nodes) {
    const int cls = train_view.graph->labels[static_cast<std::size_t>(node)];
    const auto it = std::lower_bound(train_view.class_ids.begin(), train_view.class_ids.end(), cls);
    targets.push_back(static_cast<int>(it - train_view.class_ids.begin()));
  }

  EpisodeEncoder enc(train_view, train_view.partition_nodes, cfg.backbone, params);
  const DenseMatrix logits = classify(enc.embeddings(), params);
  const CeResult ce = softmax_ce(logits, targets);
  HeadBackward hb = classify_backward(enc.embeddings(), params, ce.grad_logits);
  GradSet grads = merge_grads(enc.backward(hb.grad_embeddings), std::move(hb.head_grads));
  adam_step(params, grads, opt);
  return ce.loss;
}

ParamSet ignn_pretrain(const SplitView& train_view, int epochs, const MethodConfig& cfg,
                       std::uint64_t seed) {
  const int n_classes = static_cast<int>(train_view.class_ids.size());
  ParamSet params = init_method_params(cfg, train_view.graph->n_features(), n_classes, 0, seed);
  OptimizerState opt = make_adam(params, cfg.outer);
  for (int e = 0; e < epochs; ++e) ignn_pretrain_epoch(train_view, cfg, params, opt);
  return params;
}

ParamSet fit_probe(const DenseMatrix& support_embeddings, const std::vector<int>& support_labels,
                   int n_way, const MethodConfig& cfg) {
  ParamSet head = zero_head_params(support_embeddings.cols, n_way);
  for (int step = 0; step < cfg.probe_steps; ++step) {
    const DenseMatrix logits = classify(support_embeddings, head);
    const CeResult ce = softmax_ce(logits, support_labels);
    HeadBackward hb = classify_backward(support_embeddings, head, ce.grad_logits);
    sgd_step(head, hb.head_grads, cfg.probe_lr, cfg.outer.weight_decay);
  }
  return head;
}

EpisodeResult probe_episode(const DenseMatrix& view_embeddings, const Episode& episode,
                            const MethodConfig& cfg) {
  const std::vector<int> sup = support_nodes(episode);
  const std::vector<int> qry = query_nodes(episode);
  const DenseMatrix sup_emb = gather_rows(view_embeddings, sup);
  const DenseMatrix qry_emb = gather_rows(view_embeddings, qry);
  const ParamSet head = fit_probe(sup_emb, labels_of(episode.support), episode_n_way(episode), cfg);
  return result_from_logits(classify(qry_emb, head), labels_of(episode.query));
}

EpisodeResult linear_probe(const ParamSet& frozen_encoder, const SplitView& view,
                           const Episode& episode, const MethodConfig& cfg) {
  const DenseMatrix emb = embed_view(view, cfg.backbone, frozen_encoder);
  return probe_episode(emb, episode, cfg);
}

// --- Prototypical networks ---------------------------------------------------

DenseMatrix prototypes_from(const DenseMatrix& support_embeddings,
                            const std::vector<int>& support_labels, int n_way) {
  DenseMatrix protos(n_way, support_embeddings.cols);
  std::vector<int> counts(static_cast<std::size_t>(n_way), 0);
  for (int i = 0; i < support_embeddings.rows; ++i) {
    const int label = support_labels[static_cast<std::size_t>(i)];
    ++counts[static_cast<std::size_t>(label)];
    const auto src = support_embeddings.row(i);
    auto dst = protos.row(label);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
  }
  for (int j = 0; j < n_way; ++j) {
    const double inv = 1.0 / static_cast<double>(counts[static_cast<std::size_t>(j)]);
    for (double& v : protos.row(j)) v *= inv;
  }
  return protos;
}

DenseMatrix prototype_logits(const DenseMatrix& query_embeddings, const DenseMatrix& prototypes) {
  DenseMatrix logits(query_embeddings.rows, prototypes.rows);
  for (int q = 0; q < query_embeddings.rows; ++q) {
    const auto z = query_embeddings.row(q);
    for (int j = 0; j < prototypes.rows; ++j) {
      const auto c = prototypes.row(j);
      double dist = 0.0;
      for (std::size_t k = 0; k < z.size(); ++k) {
        const double diff = z[k] - c[k];
        dist += diff * diff;
      }
      logits.at(q, j) = -dist;
    }
  }
  return logits;
}

double protonet_episode(const SplitView& view, const Episode& episode, const ParamSet& params,
                        const MethodConfig& cfg, GradSet* grads_out, EpisodeResult* result_out) {
  const int n_way = episode_n_way(episode);
  const int n_support = static_cast<int>(episode.support.size());
  const int k_shot = n_support / n_way;
  const std::vector<int> qry_labels = labels_of(episode.query);

  EpisodeEncoder enc(view, episode_nodes(episode), cfg.backbone, params);
  const DenseMatrix& emb = enc.embeddings();
  std::vector<int> sup_rows(static_cast<std::size_t>(n_support));
  for (int i = 0; i < n_support; ++i) sup_rows[static_cast<std::size_t>(i)] = i;
  std::vector<int> qry_rows(episode.query.size());
  for (std::size_t i = 0; i < episode.query.size(); ++i) {
    qry_rows[i] = n_support + static_cast<int>(i);
  }
  const DenseMatrix sup_emb = gather_rows(emb, sup_rows);
  const DenseMatrix qry_emb = gather_rows(emb, qry_rows);

  const DenseMatrix protos = prototypes_from(sup_emb, labels_of(episode.support), n_way);
  const DenseMatrix logits = prototype_logits(qry_emb, protos);
  const CeResult ce = softmax_ce(logits, qry_labels);

  if (result_out != nullptr) *result_out = result_from_logits(logits, qry_labels);

  if (grads_out != nullptr) {
    // d logits[q][j] / d z_q = -2 (z_q - c_j);  d / d c_j = +2 (z_q - c_j)
    DenseMatrix grad_emb(emb.rows, emb.cols);
    DenseMatrix grad_protos(n_way, emb.cols);
    for (int q = 0; q < qry_emb.rows; ++q) {
      const auto z = qry_emb.row(q);
      auto gz = grad_emb.row(n_support + q);
      for (int j = 0; j < n_way; ++j) {
        const double g = ce.grad_logits.at(q, j);
        const auto c = protos.row(j);
        auto gc = grad_protos.row(j);
        for (std::size_t k = 0; k < z.size(); ++k) {
          const double diff = z[k] - c[k];
          gz[k] += -2.0 * g * diff;
          gc[k] += 2.0 * g * diff;
        }
      }
    }
    const double inv_k = 1.0 / static_cast<double>(k_shot);
    for (int i = 0; i < n_support; ++i) {
      const int label = episode.support[static_cast<std::size_t>(i)].second;
      const auto gc = grad_protos.row(label);
      auto gs = grad_emb.row(i);
      for (std::size_t k = 0; k < gc.size(); ++k) gs[k] += inv_k * gc[k];
    }
    *grads_out = enc.backward(grad_emb);
  }
  return ce.loss;
}

EpisodeResult protonet_predict(const DenseMatrix& view_embeddings, const Episode& episode) {
  const DenseMatrix sup_emb = gather_rows(view_embeddings, support_nodes(episode));
  const DenseMatrix qry_emb = gather_rows(view_embeddings, query_nodes(episode));
  const DenseMatrix protos =
      prototypes_from(sup_emb, labels_of(episode.support), episode_n_way(episode));
  return result_from_logits(prototype_logits(qry_emb, protos), labels_of(episode.query));
}

// --- First-order MAML --------------------------------------------------------

namespace {

// support CE loss and, optionally, full grads at the given parameters
double support_loss_and_grads(const SplitView& view, const Episode& ep, const ParamSet& params,
                              const MethodConfig& cfg, GradSet* grads_out) {
  EpisodeEncoder enc(view, support_nodes(ep), cfg.backbone, params);
  const DenseMatrix logits = classify(enc.embeddings(), params);
  const CeResult ce = softmax_ce(logits, labels_of(ep.support));
  if (grads_out != nullptr) {
    HeadBackward hb = classify_backward(enc.embeddings(), params, ce.grad_logits);
    *grads_out = merge_grads(enc.backward(hb.grad_embeddings), std::move(hb.head_grads));
  }
  return ce.loss;
}

}  // namespace

ParamSet fomaml_adapt(const SplitView& view, const Episode& episode, const ParamSet& params,
                      const MethodConfig& cfg, std::vector<double>* support_losses) {
  ParamSet adapted = params;
  for (int step = 0; step < cfg.inner_steps; ++step) {
    GradSet grads;
    const double loss = support_loss_and_grads(view, episode, adapted, cfg, &grads);
    if (support_losses != nullptr) support_losses->push_back(loss);
    sgd_step(adapted, grads, cfg.inner_lr, 0.0);
  }
  if (support_losses != nullptr) {
    support_losses->push_back(support_loss_and_grads(view, episode, adapted, cfg, nullptr));
  }
  return adapted;
}

GradSet fomaml_outer_grads(const SplitView& view, const Episode& episode, const ParamSet& params,
                           const MethodConfig& cfg, double* query_loss) {
  const ParamSet adapted = fomaml_adapt(view, episode, params, cfg);
  EpisodeEncoder enc(view, query_nodes(episode), cfg.backbone, adapted);
  const DenseMatrix logits = classify(enc.embeddings(), adapted);
  const CeResult ce = softmax_ce(logits, labels_of(episode.query));
  if (query_loss != nullptr) *query_loss = ce.loss;
  HeadBackward hb = classify_backward(enc.embeddings(), adapted, ce.grad_logits);
  return merge_grads(enc.backward(hb.grad_embeddings), std::move(hb.head_grads));
}

EpisodeResult fomaml_eval(const SplitView& view, const Episode& episode, const ParamSet& params,
                          const MethodConfig& cfg) {
  const ParamSet adapted = fomaml_adapt(view, episode, params, cfg);
  EpisodeEncoder enc(view, query_nodes(episode), cfg.backbone, adapted);
  const DenseMatrix logits = classify(enc.embeddings(), adapted);
  return result_from_logits(logits, labels_of(episode.query));
}

// --- Shared driver hooks ------------------------------------------------------

void train_step(const MethodConfig& cfg, const ViewSet& views, const EpisodeSpec& spec,
                ParamSet& params, OptimizerState& opt, std::uint64_t step_seed) {
  if (cfg.id == MethodId::ignn) {
    ignn_pretrain_epoch(views.train, cfg, params, opt);
    return;
  }
  RngStream rng(step_seed);
  const Episode ep = sample_episode(views.train, spec, rng);
  GradSet grads;
  if (cfg.id == MethodId::protonet) {
    protonet_episode(views.train, ep, params, cfg, &grads, nullptr);
  } else {
    grads = fomaml_outer_grads(views.train, ep, params, cfg);
  }
  adam_step(params, grads, opt);
}

EpisodeResult evaluate_episode(const MethodConfig& cfg, const SplitView& view,
                               const Episode& episode, const ParamSet& params,
                               const DenseMatrix* view_embeddings) {
  switch (cfg.id) {
    case MethodId::ignn: {
      if (view_embeddings != nullptr) return probe_episode(*view_embeddings, episode, cfg);
      return linear_probe(params, view, episode, cfg);
    }
    case MethodId::protonet: {
      if (view_embeddings != nullptr) return protonet_predict(*view_embeddings, episode);
      EpisodeResult res;
      protonet_episode(view, episode, params, cfg, nullptr, &res);
      return res;
    }
    default:
      return fomaml_eval(view, episode, params, cfg);
  }
}

}  // namespace fsnc
