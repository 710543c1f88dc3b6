#include "fsnc/encoders.hpp"

#include "fsnc/graph.hpp"

namespace fsnc {

std::string to_string(Backbone b) { return b == Backbone::gcn ? "gcn" : "mlp"; }

Backbone backbone_from_string(const std::string& s) {
  if (s == "gcn") return Backbone::gcn;
  if (s == "mlp") return Backbone::mlp;
  throw FsncError("unknown backbone: \"" + s + "\" (expected gcn or mlp)");
}

ParamSet init_encoder_params(int in_dim, int hidden, int embed, RngStream& rng) {
  ParamSet p;
  p.add(kEncW1, glorot_uniform(in_dim, hidden, rng));
  p.add(kEncW2, glorot_uniform(hidden, embed, rng));
  return p;
}

ParamSet init_head_params(int embed, int n_classes, RngStream& rng) {
  ParamSet p;
  p.add(kHeadW, glorot_uniform(embed, n_classes, rng));
  p.add(kHeadB, DenseMatrix(1, n_classes));
  return p;
}

ParamSet zero_head_params(int embed, int n_classes) {
  ParamSet p;
  p.add(kHeadW, DenseMatrix(embed, n_classes));
  p.add(kHeadB, DenseMatrix(1, n_classes));
  return p;
}

DenseMatrix gcn_forward(const CsrMatrix& norm_adj, const FeatureMatrix& x, const ParamSet& params,
                        EncoderCache* cache) {
  const DenseMatrix& w1 = params.at(kEncW1);
  const DenseMatrix& w2 = params.at(kEncW2);
  if (x.cols() != w1.rows) throw FsncError("gcn_forward: feature dim does not match W1");
  DenseMatrix pre = spmm(norm_adj, x.times(w1));
  DenseMatrix act = relu(pre);
  DenseMatrix z = spmm(norm_adj, matmul(act, w2));
  if (cache != nullptr) {
    cache->pre_activation = std::move(pre);
    cache->post_activation = std::move(act);
  }
  return z;
}

GradSet gcn_backward(const CsrMatrix& norm_adj, const FeatureMatrix& x, const ParamSet& params,
                     const EncoderCache& cache, const DenseMatrix& grad_embeddings) {
  const DenseMatrix& w2 = params.at(kEncW2);
  // A is symmetric, so A^T * G == A * G
  const DenseMatrix grad_h2 = spmm(norm_adj, grad_embeddings);
  DenseMatrix grad_w2 = matmul_tn(cache.post_activation, grad_h2);
  const DenseMatrix grad_act = matmul_nt(grad_h2, w2);
  const DenseMatrix grad_pre = relu_backward(cache.pre_activation, grad_act);
  const DenseMatrix grad_h0 = spmm(norm_adj, grad_pre);
  DenseMatrix grad_w1 = x.transposed_times(grad_h0);

  GradSet grads;
  grads.add(kEncW1, std::move(grad_w1));
  grads.add(kEncW2, std::move(grad_w2));
  return grads;
}

DenseMatrix mlp_forward(const FeatureMatrix& x, const ParamSet& params, EncoderCache* cache) {
  const DenseMatrix& w1 = params.at(kEncW1);
  const DenseMatrix& w2 = params.at(kEncW2);
  if (x.cols() != w1.rows) throw FsncError("mlp_forward: feature dim does not match W1");
  DenseMatrix pre = x.times(w1);
  DenseMatrix act = relu(pre);
  DenseMatrix z = matmul(act, w2);
  if (cache != nullptr) {
    cache->pre_activation = std::move(pre);
    cache->post_activation = std::move(act);
  }
  return z;
}

GradSet mlp_backward(const FeatureMatrix& x, const ParamSet& params, const EncoderCache& cache,
                     const DenseMatrix& grad_embeddings) {
  const DenseMatrix& w2 = params.at(kEncW2);
  DenseMatrix grad_w2 = matmul_tn(cache.post_activation, grad_embeddings);
  const DenseMatrix grad_act = matmul_nt(grad_embeddings, w2);
  const DenseMatrix grad_pre = relu_backward(cache.pre_activation, grad_act);
  DenseMatrix grad_w1 = x.transposed_times(grad_pre);

  GradSet grads;
  grads.add(kEncW1, std::move(grad_w1));
  grads.add(kEncW2, std::move(grad_w2));
  return grads;
}

DenseMatrix classify(const DenseMatrix& embeddings, const ParamSet& head) {
  const DenseMatrix& w = head.at(kHeadW);
  const DenseMatrix& b = head.at(kHeadB);
  DenseMatrix logits = matmul(embeddings, w);
  for (int i = 0; i < logits.rows; ++i) {
    auto row = logits.row(i);
    for (int j = 0; j < logits.cols; ++j) row[static_cast<std::size_t>(j)] += b.at(0, j);
  }
  return logits;
}

HeadBackward classify_backward(const DenseMatrix& embeddings, const ParamSet& head,
                               const DenseMatrix& grad_logits) {
  const DenseMatrix& w = head.at(kHeadW);
  HeadBackward out;
  DenseMatrix grad_w = matmul_tn(embeddings, grad_logits);
  DenseMatrix grad_b(1, grad_logits.cols);
  for (int i = 0; i < grad_logits.rows; ++i) {
    const auto row = grad_logits.row(i);
    for (int j = 0; j < grad_logits.cols; ++j) grad_b.at(0, j) += row[static_cast<std::size_t>(j)];
  }
  out.head_grads.add(kHeadW, std::move(grad_w));
  out.head_grads.add(kHeadB, std::move(grad_b));
  out.grad_embeddings = matmul_nt(grad_logits, w);
  return out;
}

}  // namespace fsnc
