#include "pdbc/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "pdbc/error.hpp"

namespace pdbc {

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row < b.row || (a.row == b.row && a.col < b.col);
  });
  CsrMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_.assign(rows + 1, 0);
  for (std::size_t i = 0; i < triplets.size();) {
    const auto [r, c, v0] = triplets[i];
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw Error(ErrorCode::kDimensionMismatch,
                  fmt::format("triplet ({},{}) outside {}x{} matrix", r, c, rows, cols));
    }
    double v = v0;
    std::size_t j = i + 1;
    while (j < triplets.size() && triplets[j].row == r && triplets[j].col == c) v += triplets[j++].value;
    m.col_idx_.push_back(c);
    m.values_.push_back(v);
    ++m.row_ptr_[r + 1];
    i = j;
  }
  for (int r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

CsrMatrix CsrMatrix::from_dense(const Eigen::MatrixXd& dense, double drop_tol) {
  std::vector<Triplet> t;
  for (int i = 0; i < dense.rows(); ++i) {
    for (int j = 0; j < dense.cols(); ++j) {
      if (std::abs(dense(i, j)) > drop_tol) t.push_back({i, j, dense(i, j)});
    }
  }
  return from_triplets(static_cast<int>(dense.rows()), static_cast<int>(dense.cols()), std::move(t));
}

double CsrMatrix::coeff(int row, int col) const {
  const auto begin = col_idx_.begin() + row_ptr_[row];
  const auto end = col_idx_.begin() + row_ptr_[row + 1];
  const auto it = std::lower_bound(begin, end, col);
  return (it != end && *it == col) ? values_[it - col_idx_.begin()] : 0.0;
}

Eigen::VectorXd CsrMatrix::diagonal() const {
  Eigen::VectorXd d(std::min(rows_, cols_));
  for (int i = 0; i < d.size(); ++i) d[i] = coeff(i, i);
  return d;
}

Eigen::MatrixXd CsrMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) d(r, col_idx_[p]) = values_[p];
  }
  return d;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (int r = 0; r < rows_; ++r) {
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) t.push_back({col_idx_[p], r, values_[p]});
  }
  return from_triplets(cols_, rows_, std::move(t));
}

CsrMatrix CsrMatrix::submatrix(std::span<const int> rows, std::span<const int> cols) const {
  std::vector<int> col_map(cols_, -1);
  for (std::size_t j = 0; j < cols.size(); ++j) col_map[cols[j]] = static_cast<int>(j);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int r = rows[i];
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      const int c = col_map[col_idx_[p]];
      if (c >= 0) t.push_back({static_cast<int>(i), c, values_[p]});
    }
  }
  return from_triplets(static_cast<int>(rows.size()), static_cast<int>(cols.size()), std::move(t));
}

void CsrMatrix::multiply_add(const Eigen::VectorXd& x, Eigen::VectorXd& y, double alpha) const {
  if (x.size() != cols_ || y.size() != rows_) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("CSR product: {}x{} matrix with x[{}], y[{}]", rows_, cols_, x.size(),
                            y.size()));
  }
  for (int r = 0; r < rows_; ++r) {
    double sum = 0.0;
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) sum += values_[p] * x[col_idx_[p]];
    y[r] += alpha * sum;
  }
}

Eigen::VectorXd CsrMatrix::operator*(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows_);
  multiply_add(x, y);
  return y;
}

CsrMatrix linear_combination(double a, const CsrMatrix& A, double b, const CsrMatrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "linear_combination: shapes differ");
  }
  std::vector<Triplet> t;
  t.reserve(A.nnz() + B.nnz());
  for (int r = 0; r < A.rows(); ++r) {
    for (int p = A.row_ptr_[r]; p < A.row_ptr_[r + 1]; ++p) t.push_back({r, A.col_idx_[p], a * A.values_[p]});
    for (int p = B.row_ptr_[r]; p < B.row_ptr_[r + 1]; ++p) t.push_back({r, B.col_idx_[p], b * B.values_[p]});
  }
  return CsrMatrix::from_triplets(A.rows(), A.cols(), std::move(t));
}

SparseSym::SparseSym(CsrMatrix matrix, double rel_tol) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "SparseSym: matrix is not square");
  }
  double scale = 0.0;
  for (double v : matrix_.values()) scale = std::max(scale, std::abs(v));
  const auto row_ptr = matrix_.row_ptr();
  const auto col_idx = matrix_.col_idx();
  const auto values = matrix_.values();
  for (int r = 0; r < matrix_.rows(); ++r) {
    for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
      const int c = col_idx[p];
      if (std::abs(values[p] - matrix_.coeff(c, r)) > rel_tol * scale) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("SparseSym: entries ({},{}) and ({},{}) differ", r, c, c, r));
      }
    }
  }
}

SparseSym linear_combination(double a, const SparseSym& A, double b, const SparseSym& B) {
  return SparseSym(linear_combination(a, A.matrix(), b, B.matrix()));
}

CgResult spd_solve(const SparseSym& A, const Eigen::VectorXd& b, const CgOptions& options,
                   const Eigen::VectorXd& x0) {
  const int n = A.dim();
  if (b.size() != n || (x0.size() != 0 && x0.size() != n)) {
    throw Error(ErrorCode::kDimensionMismatch, "spd_solve: right-hand side does not match matrix");
  }
  if (!(options.tol > 0.0 && options.tol < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "spd_solve: tolerance must lie in (0, 1)");
  }
  CgResult result;
  result.x = x0.size() == n ? x0 : Eigen::VectorXd::Zero(n);
  const double b_norm = b.norm();
  if (n == 0 || b_norm == 0.0) {
    result.x.setZero();
    return result;
  }

  const Eigen::VectorXd diag = A.matrix().diagonal();
  if ((diag.array() <= 0.0).any()) {
    throw Error(ErrorCode::kBreakdown, "spd_solve: non-positive diagonal entry");
  }
  const Eigen::VectorXd inv_diag = diag.cwiseInverse();
  const int max_iters = options.max_iters > 0 ? options.max_iters : 10 * n;
  const double target = options.tol * b_norm;

  Eigen::VectorXd r = b - A * result.x;
  double r_norm = r.norm();
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  Eigen::VectorXd q(n);
  double rz = r.dot(z);
  int it = 0;
  while (true) {
    if (r_norm <= target) {
      // The recurrence residual drifts from the true one; only accept the
      // latter.
      r = b - A * result.x;
      r_norm = r.norm();
      if (r_norm <= target) break;
      z = inv_diag.cwiseProduct(r);
      p = z;
      rz = r.dot(z);
    }
    if (it == max_iters) {
      throw Error(ErrorCode::kMaxIterations,
                  fmt::format("spd_solve: {} iterations, relative residual {:.3e} > {:.3e}", it,
                              r_norm / b_norm, options.tol));
    }
    q.setZero();
    A.matrix().multiply_add(p, q);
    const double curvature = p.dot(q);
    if (!(curvature > 0.0)) {
      throw Error(ErrorCode::kBreakdown,
                  fmt::format("spd_solve: non-positive curvature {:.3e} at iteration {}", curvature, it));
    }
    const double step = rz / curvature;
    result.x.noalias() += step * p;
    r.noalias() -= step * q;
    r_norm = r.norm();
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
    ++it;
  }
  result.iterations = it;
  result.relative_residual = r_norm / b_norm;
  return result;
}

double estimate_opnorm(const LinearMap& apply, int n, int iters, const InnerProduct& inner) {
  if (n <= 0 || iters <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "estimate_opnorm: need n > 0 and iters > 0");
  }
  auto dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return inner ? inner(a, b) : a.dot(b);
  };
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> uniform(0.5, 1.5);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = uniform(rng);
  x /= std::sqrt(dot(x, x));

  double best = 0.0;
  for (int it = 0; it < iters; ++it) {
    const Eigen::VectorXd y = apply(x);
    best = std::max(best, dot(x, y));
    const double y_norm = std::sqrt(dot(y, y));
    if (y_norm == 0.0) break;
    x = y / y_norm;
  }
  return best;
}

}  // namespace pdbc
