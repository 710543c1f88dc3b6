#include "fsnc/nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "fsnc/graph.hpp"

namespace fsnc {

void ParamSet::add(std::string name, DenseMatrix tensor) {
  if (contains(name)) throw FsncError("duplicate parameter name: " + name);
  names_.push_back(std::move(name));
  tensors_.push_back(std::move(tensor));
}

DenseMatrix& ParamSet::at(std::string_view name) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return tensors_[i];
  }
  throw FsncError("no parameter named \"" + std::string(name) + "\"");
}

const DenseMatrix& ParamSet::at(std::string_view name) const {
  return const_cast<ParamSet*>(this)->at(name);
}

bool ParamSet::contains(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

double ParamSet::checksum() const {
  double sum = 0.0;
  for (const auto& t : tensors_) {
    for (double v : t.values) sum += v;
  }
  return sum;
}

bool ParamSet::equals(const ParamSet& other) const {
  if (names_ != other.names_) return false;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (tensors_[i].rows != other.tensors_[i].rows || tensors_[i].cols != other.tensors_[i].cols ||
        tensors_[i].values != other.tensors_[i].values) {
      return false;
    }
  }
  return true;
}

void save_params(const ParamSet& params, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "fsnc-params";
  j["version"] = 1;
  nlohmann::json tensors = nlohmann::json::array();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const DenseMatrix& t = params.tensor(i);
    tensors.push_back({{"name", params.name(i)}, {"rows", t.rows}, {"cols", t.cols}, {"values", t.values}});
  }
  j["tensors"] = std::move(tensors);
  std::ofstream out(path);
  if (!out) throw FsncError("cannot write " + path.string());
  out << j.dump() << "\n";
}

ParamSet load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FsncError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FsncError(path.string() + ": invalid JSON: " + e.what());
  }
  if (j.value("format", "") != "fsnc-params") throw FsncError(path.string() + ": not a parameter checkpoint");
  ParamSet out;
  for (const auto& t : j.at("tensors")) {
    DenseMatrix m(t.at("rows").get<int>(), t.at("cols").get<int>());
    m.values = t.at("values").get<std::vector<double>>();
    if (m.values.size() != static_cast<std::size_t>(m.rows) * static_cast<std::size_t>(m.cols)) {
      throw FsncError(path.string() + ": tensor size mismatch");
    }
    out.add(t.at("name").get<std::string>(), std::move(m));
  }
  return out;
}

DenseMatrix glorot_uniform(int rows, int cols, RngStream& rng) {
  DenseMatrix m(rows, cols);
  const double limit = std::sqrt(6.0 / (static_cast<double>(rows) + static_cast<double>(cols)));
  for (double& v : m.values) v = rng.uniform(-limit, limit);
  return m;
}

DenseMatrix softmax(const DenseMatrix& logits) {
  DenseMatrix out(logits.rows, logits.cols);
  for (int i = 0; i < logits.rows; ++i) {
    const auto in_row = logits.row(i);
    auto out_row = out.row(i);
    double row_max = in_row[0];
    for (double v : in_row) row_max = std::max(row_max, v);
    double sum = 0.0;
    for (int j = 0; j < logits.cols; ++j) {
      out_row[static_cast<std::size_t>(j)] = std::exp(in_row[static_cast<std::size_t>(j)] - row_max);
      sum += out_row[static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < logits.cols; ++j) out_row[static_cast<std::size_t>(j)] /= sum;
  }
  return out;
}

CeResult softmax_ce(const DenseMatrix& logits, std::span<const int> targets) {
  if (static_cast<int>(targets.size()) != logits.rows) {
    throw FsncError("softmax_ce: target count does not match logit rows");
  }
  if (!logits.all_finite()) throw FsncError("softmax_ce: non-finite logits");
  const int m = logits.rows;
  const int c = logits.cols;
  for (int t : targets) {
    if (t < 0 || t >= c) throw FsncError("softmax_ce: label out of range: " + std::to_string(t));
  }

  CeResult res;
  res.grad_logits = DenseMatrix(m, c);
  double total = 0.0;
  const double inv_m = 1.0 / static_cast<double>(m);
  for (int i = 0; i < m; ++i) {
    const auto in_row = logits.row(i);
    double row_max = in_row[0];
    for (double v : in_row) row_max = std::max(row_max, v);
    double sum = 0.0;
    auto grad_row = res.grad_logits.row(i);
    for (int j = 0; j < c; ++j) {
      grad_row[static_cast<std::size_t>(j)] = std::exp(in_row[static_cast<std::size_t>(j)] - row_max);
      sum += grad_row[static_cast<std::size_t>(j)];
    }
    const int t = targets[static_cast<std::size_t>(i)];
    // -log softmax[t] = log(sum) - (logit[t] - max)
    total += std::log(sum) - (in_row[static_cast<std::size_t>(t)] - row_max);
    for (int j = 0; j < c; ++j) grad_row[static_cast<std::size_t>(j)] *= inv_m / sum;
    grad_row[static_cast<std::size_t>(t)] -= inv_m;
  }
  res.loss = total * inv_m;
  return res;
}

OptimizerState make_adam(const ParamSet& params, const AdamConfig& config) {
  OptimizerState state;
  state.config = config;
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.first_moment.emplace_back(params.tensor(i).rows, params.tensor(i).cols);
    state.second_moment.emplace_back(params.tensor(i).rows, params.tensor(i).cols);
  }
  return state;
}

void adam_step(ParamSet& params, const GradSet& grads, OptimizerState& state) {
  if (grads.size() != params.size() || state.first_moment.size() != params.size()) {
    throw FsncError("adam_step: parameter/gradient/state layouts disagree");
  }
  const AdamConfig& cfg = state.config;
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    DenseMatrix& p = params.tensor(i);
    const DenseMatrix& g = grads.tensor(i);
    if (p.rows != g.rows || p.cols != g.cols) {
      throw FsncError("adam_step: shape mismatch for \"" + params.name(i) + "\"");
    }
    DenseMatrix& m = state.first_moment[i];
    DenseMatrix& v = state.second_moment[i];
    for (std::size_t k = 0; k < p.values.size(); ++k) {
      m.values[k] = cfg.beta1 * m.values[k] + (1.0 - cfg.beta1) * g.values[k];
      v.values[k] = cfg.beta2 * v.values[k] + (1.0 - cfg.beta2) * g.values[k] * g.values[k];
      const double m_hat = m.values[k] / bc1;
      const double v_hat = v.values[k] / bc2;
      p.values[k] -= cfg.lr * (m_hat / (std::sqrt(v_hat) + cfg.eps) + cfg.weight_decay * p.values[k]);
    }
  }
}

void sgd_step(ParamSet& params, const GradSet& grads, double lr, double weight_decay) {
  if (grads.size() != params.size()) throw FsncError("sgd_step: layouts disagree");
  for (std::size_t i = 0; i < params.size(); ++i) {
    DenseMatrix& p = params.tensor(i);
    const DenseMatrix& g = grads.tensor(i);
    if (p.rows != g.rows || p.cols != g.cols) {
      throw FsncError("sgd_step: shape mismatch for \"" + params.name(i) + "\"");
    }
    for (std::size_t k = 0; k < p.values.size(); ++k) {
      p.values[k] -= lr * (g.values[k] + weight_decay * p.values[k]);
    }
  }
}

GradCheckReport grad_check(const std::function<double(const ParamSet&)>& loss_fn,
                           const ParamSet& params, const GradSet& analytic, double h, double tol,
                           int max_coords_per_param, RngStream& rng) {
  GradCheckReport report;
  ParamSet work = params;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const int numel = static_cast<int>(params.tensor(i).values.size());
    std::vector<int> coords;
    if (numel <= max_coords_per_param) {
      coords.resize(static_cast<std::size_t>(numel));
      for (int k = 0; k < numel; ++k) coords[static_cast<std::size_t>(k)] = k;
    } else {
      coords = rng.sample_without_replacement(numel, max_coords_per_param);
    }
    for (int k : coords) {
      double& slot = work.tensor(i).values[static_cast<std::size_t>(k)];
      const double saved = slot;
      slot = saved + h;
      const double plus = loss_fn(work);
      slot = saved - h;
      const double minus = loss_fn(work);
      slot = saved;

      const double numeric = (plus - minus) / (2.0 * h);
      const double a = analytic.tensor(i).values[static_cast<std::size_t>(k)];
      const double err = std::abs(a - numeric) / std::max(1.0, std::abs(a));
      report.coordinates_checked += 1;
      report.max_error = std::max(report.max_error, err);
      if (err > tol) {
        report.violations.push_back({params.name(i), k, a, numeric, err});
      }
    }
  }
  return report;
}

}  // namespace fsnc
