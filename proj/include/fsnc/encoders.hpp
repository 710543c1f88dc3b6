#pragma once

#include <string>

#include "fsnc/matrix.hpp"
#include "fsnc/nn.hpp"

namespace fsnc {

enum class Backbone { gcn, mlp };

std::string to_string(Backbone b);
Backbone backbone_from_string(const std::string& s);

// Parameter names used by the encoder and head functions.
inline constexpr const char* kEncW1 = "enc.W1";
inline constexpr const char* kEncW2 = "enc.W2";
inline constexpr const char* kHeadW = "head.W";
inline constexpr const char* kHeadB = "head.b";

/// Two-layer encoder parameters: W1 (d x h), W2 (h x e).
ParamSet init_encoder_params(int in_dim, int hidden, int embed, RngStream& rng);
/// Linear head parameters: W (e x c), b (1 x c), Glorot W and zero bias.
ParamSet init_head_params(int embed, int n_classes, RngStream& rng);
/// Linear head initialized to all zeros (used by the probe).
ParamSet zero_head_params(int embed, int n_classes);

struct EncoderCache {
  DenseMatrix pre_activation;   // first-layer output before ReLU
  DenseMatrix post_activation;  // after ReLU
};

/// Z = A * relu(A * X * W1) * W2 with A the normalized adjacency.
DenseMatrix gcn_forward(const CsrMatrix& norm_adj, const FeatureMatrix& x, const ParamSet& params,
                        EncoderCache* cache = nullptr);
GradSet gcn_backward(const CsrMatrix& norm_adj, const FeatureMatrix& x, const ParamSet& params,
                     const EncoderCache& cache, const DenseMatrix& grad_embeddings);

/// Z = relu(X * W1) * W2; the adjacency never enters.
DenseMatrix mlp_forward(const FeatureMatrix& x, const ParamSet& params, EncoderCache* cache = nullptr);
GradSet mlp_backward(const FeatureMatrix& x, const ParamSet& params, const EncoderCache& cache,
                     const DenseMatrix& grad_embeddings);

/// logits = Z * W + b.
DenseMatrix classify(const DenseMatrix& embeddings, const ParamSet& head);

struct HeadBackward {
  GradSet head_grads;          // head.W, head.b
  DenseMatrix grad_embeddings;  // upstream gradient for the encoder
};
HeadBackward classify_backward(const DenseMatrix& embeddings, const ParamSet& head,
                               const DenseMatrix& grad_logits);

}  // namespace fsnc
