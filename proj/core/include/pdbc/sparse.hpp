#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace pdbc {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix with sorted, duplicate-free column indices.
class CsrMatrix {
 public:
  CsrMatrix() = default;

  /// Duplicates are summed; entries are stored in (row, col) order.
  static CsrMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
  static CsrMatrix from_dense(const Eigen::MatrixXd& dense, double drop_tol = 0.0);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(values_.size()); }
  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  double coeff(int row, int col) const;
  Eigen::VectorXd diagonal() const;
  Eigen::MatrixXd to_dense() const;
  CsrMatrix transpose() const;

  /// Block with the given row and column index sets, in the order given.
  CsrMatrix submatrix(std::span<const int> rows, std::span<const int> cols) const;

  /// y += alpha * A x
  void multiply_add(const Eigen::VectorXd& x, Eigen::VectorXd& y, double alpha = 1.0) const;
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;

  /// a * A + b * B for matrices of equal shape.
  friend CsrMatrix linear_combination(double a, const CsrMatrix& A, double b, const CsrMatrix& B);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

CsrMatrix linear_combination(double a, const CsrMatrix& A, double b, const CsrMatrix& B);

/// Square CSR matrix checked to be symmetric on construction.
class SparseSym {
 public:
  SparseSym() = default;
  /// Throws Error(kInvalidArgument) when the matrix is not square or not
  /// symmetric to `rel_tol` relative to its largest entry.
  explicit SparseSym(CsrMatrix matrix, double rel_tol = 1e-12);

  int dim() const { return matrix_.rows(); }
  const CsrMatrix& matrix() const { return matrix_; }
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const { return matrix_ * x; }
  double coeff(int row, int col) const { return matrix_.coeff(row, col); }
  Eigen::MatrixXd to_dense() const { return matrix_.to_dense(); }

 private:
  CsrMatrix matrix_;
};

/// a * A + b * B, symmetric by construction.
SparseSym linear_combination(double a, const SparseSym& A, double b, const SparseSym& B);

struct CgOptions {
  double tol = 1e-10;  ///< relative residual ||b - Ax|| / ||b||
  int max_iters = 0;   ///< 0 means 10 * n
};

struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients. `x0` is an optional initial
/// guess (empty means zero). Throws Error(kBreakdown) on non-positive
/// curvature or diagonal and Error(kMaxIterations) when the iteration budget
/// is exhausted.
CgResult spd_solve(const SparseSym& A, const Eigen::VectorXd& b, const CgOptions& options = {},
                   const Eigen::VectorXd& x0 = Eigen::VectorXd());

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using InnerProduct = std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

/// Power iteration for the largest eigenvalue of an operator that is
/// self-adjoint and positive semidefinite in `inner` (Euclidean if empty).
/// Returns the largest Rayleigh quotient seen; the start vector is a fixed
/// pseudo-random vector so the result is deterministic.
double estimate_opnorm(const LinearMap& apply, int n, int iters, const InnerProduct& inner = {});

}  // namespace pdbc
