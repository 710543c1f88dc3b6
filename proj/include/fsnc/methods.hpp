#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fsnc/encoders.hpp"
#include "fsnc/episodes.hpp"
#include "fsnc/nn.hpp"
#include "fsnc/splits.hpp"

namespace fsnc {

enum class MethodId { ignn, protonet, maml, meta_gnn };

std::string to_string(MethodId m);
MethodId method_from_string(const std::string& s);

struct MethodConfig {
  MethodId id = MethodId::ignn;
  Backbone backbone = Backbone::gcn;
  int hidden = 64;
  int embedding = 32;
  // MAML inner loop
  double inner_lr = 0.05;
  int inner_steps = 10;
  // I-GNN linear probe
  double probe_lr = 1e-2;
  int probe_steps = 300;
  // outer/pretrain optimizer
  AdamConfig outer{};

  static Backbone default_backbone(MethodId id);
  /// Enforces the method/backbone pairing: ignn and meta_gnn propagate
  /// through the graph, maml and protonet are per-node (mlp).
  void validate() const;
};

struct EpisodeResult {
  double accuracy = 0.0;
  std::vector<int> predictions;  // episode-label space, one per query
};

/// Encoder (+ head where the method trains one) initialized from `seed`.
/// ignn heads cover the train classes; maml heads cover n_way.
ParamSet init_method_params(const MethodConfig& cfg, int in_dim, int n_train_classes, int n_way,
                            std::uint64_t seed);

/// Embeds every node of the view with the given backbone (no cache).
DenseMatrix embed_view(const SplitView& view, Backbone backbone, const ParamSet& params);

/// Embeds a chosen node subset and backpropagates row gradients, hiding
/// the backbone difference: mlp works on gathered feature rows, gcn runs
/// the full view and scatters row gradients back.
class EpisodeEncoder {
 public:
  EpisodeEncoder(const SplitView& view, std::vector<int> nodes, Backbone backbone,
                 const ParamSet& params);

  const DenseMatrix& embeddings() const { return embeddings_; }
  GradSet backward(const DenseMatrix& grad_rows) const;

 private:
  const SplitView& view_;
  std::vector<int> nodes_;
  Backbone backbone_;
  const ParamSet& params_;
  EncoderCache cache_;
  FeatureMatrix gathered_;  // mlp only
  DenseMatrix embeddings_;
};

// --- I-GNN -----------------------------------------------------------------

/// One epoch = one full-batch cross-entropy step over all nodes of the
/// view's classes (labels remapped to 0..C-1 by ascending class id), with
/// decoupled weight decay on encoder and head. Returns the epoch loss.
double ignn_pretrain_epoch(const SplitView& train_view, const MethodConfig& cfg, ParamSet& params,
                           OptimizerState& opt);

/// Initialization plus `epochs` pretrain epochs (0 epochs returns the
/// untouched initialization).
ParamSet ignn_pretrain(const SplitView& train_view, int epochs, const MethodConfig& cfg,
                       std::uint64_t seed);

/// Fits a fresh zero-initialized linear head on the support embeddings by
/// full-batch gradient descent.
ParamSet fit_probe(const DenseMatrix& support_embeddings, const std::vector<int>& support_labels,
                   int n_way, const MethodConfig& cfg);

/// Probe evaluation against precomputed whole-view embeddings.
EpisodeResult probe_episode(const DenseMatrix& view_embeddings, const Episode& episode,
                            const MethodConfig& cfg);

/// Convenience wrapper: embed the view with the frozen encoder, then probe.
EpisodeResult linear_probe(const ParamSet& frozen_encoder, const SplitView& view,
                           const Episode& episode, const MethodConfig& cfg);

// --- Prototypical networks ---------------------------------------------------

/// Class prototypes: mean support embedding per episode label (rows 0..N-1).
DenseMatrix prototypes_from(const DenseMatrix& support_embeddings,
                            const std::vector<int>& support_labels, int n_way);

/// logits[q][j] = -||z_q - c_j||^2.
DenseMatrix prototype_logits(const DenseMatrix& query_embeddings, const DenseMatrix& prototypes);

/// Query cross-entropy through prototypes. Fills grads_out (train) and/or
/// result_out (eval); returns the query loss.
double protonet_episode(const SplitView& view, const Episode& episode, const ParamSet& params,
                        const MethodConfig& cfg, GradSet* grads_out, EpisodeResult* result_out);

/// Eval fast path against precomputed whole-view embeddings.
EpisodeResult protonet_predict(const DenseMatrix& view_embeddings, const Episode& episode);

// --- First-order MAML --------------------------------------------------------

/// Inner loop: `inner_steps` full-batch support CE gradient steps at
/// inner_lr on a copy of the parameters. support_losses, when given,
/// receives the support loss before each step and after the last one.
ParamSet fomaml_adapt(const SplitView& view, const Episode& episode, const ParamSet& params,
                      const MethodConfig& cfg, std::vector<double>* support_losses = nullptr);

/// First-order outer gradient: query CE gradient evaluated at the adapted
/// parameters, to be applied to the shared initialization.
GradSet fomaml_outer_grads(const SplitView& view, const Episode& episode, const ParamSet& params,
                           const MethodConfig& cfg, double* query_loss = nullptr);

/// Adapt on support, then measure query accuracy.
EpisodeResult fomaml_eval(const SplitView& view, const Episode& episode, const ParamSet& params,
                          const MethodConfig& cfg);

// --- Shared driver hooks ------------------------------------------------------

/// One Algorithm-style training step: a pretrain epoch for ignn, one
/// sampled meta-train episode and outer update for the episodic methods.
void train_step(const MethodConfig& cfg, const ViewSet& views, const EpisodeSpec& spec,
                ParamSet& params, OptimizerState& opt, std::uint64_t step_seed);

/// Evaluation dispatch. view_embeddings may be null; when given it must be
/// embed_view(view, cfg.backbone, params) and lets ignn/protonet skip
/// re-encoding. Never mutates params (maml adapts a copy).
EpisodeResult evaluate_episode(const MethodConfig& cfg, const SplitView& view,
                               const Episode& episode, const ParamSet& params,
                               const DenseMatrix* view_embeddings = nullptr);

}  // namespace fsnc
