#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fsnc/matrix.hpp"
#include "fsnc/rng.hpp"

namespace fsnc {

/// Flat, name-addressed collection of dense parameter tensors. Iteration
/// order is insertion order and is part of the determinism contract.
class ParamSet {
 public:
  void add(std::string name, DenseMatrix tensor);
  DenseMatrix& at(std::string_view name);
  const DenseMatrix& at(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::size_t size() const { return tensors_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  DenseMatrix& tensor(std::size_t i) { return tensors_[i]; }
  const DenseMatrix& tensor(std::size_t i) const { return tensors_[i]; }

  /// Sum over all entries; cheap fingerprint for frozen-parameter checks.
  double checksum() const;
  /// True when both sets have identical names, shapes and bit-equal values.
  bool equals(const ParamSet& other) const;

 private:
  std::vector<std::string> names_;
  std::vector<DenseMatrix> tensors_;
};

/// Gradients use the same layout as the parameters they refer to.
using GradSet = ParamSet;

void save_params(const ParamSet& params, const std::filesystem::path& path);
ParamSet load_params(const std::filesystem::path& path);

/// Glorot-uniform initialization: U(-a, a) with a = sqrt(6/(fan_in+fan_out)).
DenseMatrix glorot_uniform(int rows, int cols, RngStream& rng);

struct CeResult {
  double loss = 0.0;           // mean over rows
  DenseMatrix grad_logits;     // (softmax - onehot) / m
};

/// Row-stabilized softmax cross-entropy with analytic gradient.
CeResult softmax_ce(const DenseMatrix& logits, std::span<const int> targets);
DenseMatrix softmax(const DenseMatrix& logits);

struct AdamConfig {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 5e-4;  // decoupled: p -= lr * wd * p
};

struct OptimizerState {
  AdamConfig config;
  long step = 0;
  std::vector<DenseMatrix> first_moment;
  std::vector<DenseMatrix> second_moment;
};

OptimizerState make_adam(const ParamSet& params, const AdamConfig& config);
void adam_step(ParamSet& params, const GradSet& grads, OptimizerState& state);

/// Plain full-batch gradient descent step with decoupled weight decay,
/// used by the linear probe and the MAML inner loop (decay optional).
void sgd_step(ParamSet& params, const GradSet& grads, double lr, double weight_decay = 0.0);

struct GradCheckReport {
  struct Violation {
    std::string param;
    int index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double error = 0.0;
  };
  int coordinates_checked = 0;
  double max_error = 0.0;  // max over |analytic - numeric| / max(1, |analytic|)
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

/// Central-difference check of `analytic` against loss_fn, sampling up to
/// max_coords_per_param coordinates per tensor.
GradCheckReport grad_check(const std::function<double(const ParamSet&)>& loss_fn,
                           const ParamSet& params, const GradSet& analytic, double h, double tol,
                           int max_coords_per_param, RngStream& rng);

}  // namespace fsnc
