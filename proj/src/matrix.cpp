#include "fsnc/matrix.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace fsnc {

bool DenseMatrix::all_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

CsrMatrix CsrMatrix::identity(int n) {
  CsrMatrix m(n, n);
  m.indices.resize(static_cast<std::size_t>(n));
  m.values.assign(static_cast<std::size_t>(n), 1.0);
  for (int i = 0; i < n; ++i) {
    m.indptr[static_cast<std::size_t>(i) + 1] = i + 1;
    m.indices[static_cast<std::size_t>(i)] = i;
  }
  return m;
}

DenseMatrix CsrMatrix::to_dense() const {
  DenseMatrix out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (std::int64_t k = indptr[static_cast<std::size_t>(i)];
         k < indptr[static_cast<std::size_t>(i) + 1]; ++k) {
      out.at(i, indices[static_cast<std::size_t>(k)]) = values[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

CsrMatrix CsrMatrix::select(std::span<const int> keep_rows, std::span<const int> col_map) const {
  int new_cols = 0;
  for (int m : col_map) {
    if (m >= 0) ++new_cols;
  }
  CsrMatrix out(static_cast<int>(keep_rows.size()), new_cols);
  for (std::size_t r = 0; r < keep_rows.size(); ++r) {
    const int i = keep_rows[r];
    for (std::int64_t k = indptr[static_cast<std::size_t>(i)];
         k < indptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const int mapped = col_map[static_cast<std::size_t>(indices[static_cast<std::size_t>(k)])];
      if (mapped < 0) continue;
      out.indices.push_back(mapped);
      out.values.push_back(values[static_cast<std::size_t>(k)]);
    }
    out.indptr[r + 1] = static_cast<std::int64_t>(out.indices.size());
  }
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: inner dimensions disagree");
  DenseMatrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      const auto brow = b.row(k);
      auto orow = out.row(i);
      for (int j = 0; j < b.cols; ++j) orow[static_cast<std::size_t>(j)] += aik * brow[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows != b.rows) throw std::invalid_argument("matmul_tn: inner dimensions disagree");
  DenseMatrix out(a.cols, b.cols);
  for (int k = 0; k < a.rows; ++k) {
    const auto arow = a.row(k);
    const auto brow = b.row(k);
    for (int i = 0; i < a.cols; ++i) {
      const double aki = arow[static_cast<std::size_t>(i)];
      if (aki == 0.0) continue;
      auto orow = out.row(i);
      for (int j = 0; j < b.cols; ++j) orow[static_cast<std::size_t>(j)] += aki * brow[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.cols) throw std::invalid_argument("matmul_nt: inner dimensions disagree");
  DenseMatrix out(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i) {
    const auto arow = a.row(i);
    for (int j = 0; j < b.rows; ++j) {
      const auto brow = b.row(j);
      double sum = 0.0;
      for (int k = 0; k < a.cols; ++k) sum += arow[static_cast<std::size_t>(k)] * brow[static_cast<std::size_t>(k)];
      out.at(i, j) = sum;
    }
  }
  return out;
}

void add_scaled(DenseMatrix& a, const DenseMatrix& b, double scale) {
  assert(a.rows == b.rows && a.cols == b.cols);
  for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] += scale * b.values[i];
}

void scale(DenseMatrix& a, double s) {
  for (double& v : a.values) v *= s;
}

DenseMatrix relu(const DenseMatrix& x) {
  DenseMatrix out = x;
  for (double& v : out.values) {
    if (v < 0.0) v = 0.0;
  }
  return out;
}

DenseMatrix relu_backward(const DenseMatrix& pre, const DenseMatrix& grad) {
  assert(pre.rows == grad.rows && pre.cols == grad.cols);
  DenseMatrix out = grad;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (pre.values[i] <= 0.0) out.values[i] = 0.0;
  }
  return out;
}

DenseMatrix gather_rows(const DenseMatrix& x, std::span<const int> rows) {
  DenseMatrix out(static_cast<int>(rows.size()), x.cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = x.row(rows[r]);
    auto dst = out.row(static_cast<int>(r));
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = src[j];
  }
  return out;
}

DenseMatrix scatter_rows(const DenseMatrix& x, std::span<const int> rows, int n_rows) {
  DenseMatrix out(n_rows, x.cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = x.row(static_cast<int>(r));
    auto dst = out.row(rows[r]);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
  }
  return out;
}

DenseMatrix spmm(const CsrMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("spmm: inner dimensions disagree");
  DenseMatrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    auto orow = out.row(i);
    for (std::int64_t k = a.indptr[static_cast<std::size_t>(i)];
         k < a.indptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const double v = a.values[static_cast<std::size_t>(k)];
      const auto brow = b.row(a.indices[static_cast<std::size_t>(k)]);
      for (int j = 0; j < b.cols; ++j) orow[static_cast<std::size_t>(j)] += v * brow[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

DenseMatrix spmm_tn(const CsrMatrix& a, const DenseMatrix& b) {
  if (a.rows != b.rows) throw std::invalid_argument("spmm_tn: inner dimensions disagree");
  DenseMatrix out(a.cols, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const auto brow = b.row(i);
    for (std::int64_t k = a.indptr[static_cast<std::size_t>(i)];
         k < a.indptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const double v = a.values[static_cast<std::size_t>(k)];
      auto orow = out.row(a.indices[static_cast<std::size_t>(k)]);
      for (int j = 0; j < b.cols; ++j) orow[static_cast<std::size_t>(j)] += v * brow[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

FeatureMatrix FeatureMatrix::from_dense(DenseMatrix dense, double sparse_threshold) {
  const std::size_t total = dense.values.size();
  std::size_t nonzero = 0;
  for (double v : dense.values) {
    if (v != 0.0) ++nonzero;
  }
  const double density = total == 0 ? 1.0 : static_cast<double>(nonzero) / static_cast<double>(total);
  if (density >= sparse_threshold) return FeatureMatrix(std::move(dense));

  CsrMatrix sp(dense.rows, dense.cols);
  sp.indices.reserve(nonzero);
  sp.values.reserve(nonzero);
  for (int i = 0; i < dense.rows; ++i) {
    for (int j = 0; j < dense.cols; ++j) {
      const double v = dense.at(i, j);
      if (v != 0.0) {
        sp.indices.push_back(j);
        sp.values.push_back(v);
      }
    }
    sp.indptr[static_cast<std::size_t>(i) + 1] = static_cast<std::int64_t>(sp.indices.size());
  }
  return FeatureMatrix(std::move(sp));
}

int FeatureMatrix::rows() const {
  return is_sparse() ? sparse().rows : dense().rows;
}

int FeatureMatrix::cols() const {
  return is_sparse() ? sparse().cols : dense().cols;
}

DenseMatrix FeatureMatrix::to_dense() const {
  return is_sparse() ? sparse().to_dense() : dense();
}

DenseMatrix FeatureMatrix::times(const DenseMatrix& w) const {
  return is_sparse() ? spmm(sparse(), w) : matmul(dense(), w);
}

DenseMatrix FeatureMatrix::transposed_times(const DenseMatrix& g) const {
  return is_sparse() ? spmm_tn(sparse(), g) : matmul_tn(dense(), g);
}

FeatureMatrix FeatureMatrix::gather(std::span<const int> row_ids) const {
  if (!is_sparse()) return FeatureMatrix(gather_rows(dense(), row_ids));
  const CsrMatrix& src = sparse();
  CsrMatrix out(static_cast<int>(row_ids.size()), src.cols);
  for (std::size_t r = 0; r < row_ids.size(); ++r) {
    const int i = row_ids[r];
    for (std::int64_t k = src.indptr[static_cast<std::size_t>(i)];
         k < src.indptr[static_cast<std::size_t>(i) + 1]; ++k) {
      out.indices.push_back(src.indices[static_cast<std::size_t>(k)]);
      out.values.push_back(src.values[static_cast<std::size_t>(k)]);
    }
    out.indptr[r + 1] = static_cast<std::int64_t>(out.indices.size());
  }
  return FeatureMatrix(std::move(out));
}

bool FeatureMatrix::equals(const FeatureMatrix& other) const {
  if (rows() != other.rows() || cols() != other.cols()) return false;
  const DenseMatrix a = to_dense();
  const DenseMatrix b = other.to_dense();
  return a.values == b.values;
}

}  // namespace fsnc
