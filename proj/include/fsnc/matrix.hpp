#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace fsnc {

/// Row-major dense matrix of 64-bit reals.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // rows * cols, row-major

  DenseMatrix() = default;
  DenseMatrix(int r, int c)
      : rows(r), cols(c), values(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}

  double& at(int i, int j) {
    return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) +
                  static_cast<std::size_t>(j)];
  }
  double at(int i, int j) const {
    return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) +
                  static_cast<std::size_t>(j)];
  }
  std::span<double> row(int i) {
    return {values.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols),
            static_cast<std::size_t>(cols)};
  }
  std::span<const double> row(int i) const {
    return {values.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols),
            static_cast<std::size_t>(cols)};
  }
  std::size_t size() const { return values.size(); }
  bool all_finite() const;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> indptr;  // rows + 1
  std::vector<int> indices;
  std::vector<double> values;

  CsrMatrix() : indptr(1, 0) {}
  CsrMatrix(int r, int c) : rows(r), cols(c), indptr(static_cast<std::size_t>(r) + 1, 0) {}

  std::int64_t nnz() const { return indptr.empty() ? 0 : indptr.back(); }
  static CsrMatrix identity(int n);
  DenseMatrix to_dense() const;

  /// Submatrix on the given (sorted, valid) rows and the same columns
  /// remapped through col_map (entries with col_map[c] < 0 are dropped).
  CsrMatrix select(std::span<const int> keep_rows, std::span<const int> col_map) const;
};

// Dense kernels. Accumulation is sequential row-major, so results are
// bit-reproducible.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);     // a * b
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);  // a^T * b
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);  // a * b^T

void add_scaled(DenseMatrix& a, const DenseMatrix& b, double scale);  // a += scale * b
void scale(DenseMatrix& a, double s);

DenseMatrix relu(const DenseMatrix& x);
/// grad masked by pre-activation sign: out = grad .* (pre > 0).
DenseMatrix relu_backward(const DenseMatrix& pre, const DenseMatrix& grad);

DenseMatrix gather_rows(const DenseMatrix& x, std::span<const int> rows);
/// out[rows[i], :] += x[i, :] into an (n_rows x x.cols) zero matrix.
DenseMatrix scatter_rows(const DenseMatrix& x, std::span<const int> rows, int n_rows);

/// Sparse-dense product a * b; a is CSR (m x k), b dense (k x n).
DenseMatrix spmm(const CsrMatrix& a, const DenseMatrix& b);
/// a^T * b; a is CSR (m x k), b dense (m x n); result (k x n).
DenseMatrix spmm_tn(const CsrMatrix& a, const DenseMatrix& b);

/// Node features, stored sparse (CSR) or dense depending on density.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(DenseMatrix dense) : storage_(std::move(dense)) {}
  explicit FeatureMatrix(CsrMatrix sparse) : storage_(std::move(sparse)) {}

  /// Picks CSR when density < threshold, dense otherwise.
  static FeatureMatrix from_dense(DenseMatrix dense, double sparse_threshold = 0.05);

  int rows() const;
  int cols() const;
  bool is_sparse() const { return std::holds_alternative<CsrMatrix>(storage_); }
  const CsrMatrix& sparse() const { return std::get<CsrMatrix>(storage_); }
  const DenseMatrix& dense() const { return std::get<DenseMatrix>(storage_); }

  DenseMatrix to_dense() const;
  DenseMatrix times(const DenseMatrix& w) const;             // X * W
  DenseMatrix transposed_times(const DenseMatrix& g) const;  // X^T * G
  FeatureMatrix gather(std::span<const int> row_ids) const;

  bool equals(const FeatureMatrix& other) const;  // exact value equality

 private:
  std::variant<DenseMatrix, CsrMatrix> storage_;
};

}  // namespace fsnc
