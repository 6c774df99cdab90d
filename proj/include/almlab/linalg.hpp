#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "almlab/errors.hpp"

namespace almlab {

using Vector = std::vector<double>;
using Index = std::size_t;

// ---------------------------------------------------------------------------
// Vector helpers
// ---------------------------------------------------------------------------

double dot(const Vector& a, const Vector& b);
double norm(const Vector& v);
double norm_sq(const Vector& v);
double linf_norm(const Vector& v);
Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
Vector scaled(const Vector& v, double s);
// y += s * x
void axpy(double s, const Vector& x, Vector& y);
Vector zeros(Index n);
Vector unit(Index n, Index i);
bool all_finite(const Vector& v);

// ---------------------------------------------------------------------------
// Dense row-major matrix
// ---------------------------------------------------------------------------

class Matrix {
 public:
  Matrix() = default;
  Matrix(Index rows, Index cols, double fill = 0.0);

  static Matrix identity(Index n);
  static Matrix from_rows(const std::vector<Vector>& rows);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  double& operator()(Index i, Index j) { return data_[i * cols_ + j]; }
  double operator()(Index i, Index j) const { return data_[i * cols_ + j]; }

  Vector apply(const Vector& v) const;
  Vector apply_transpose(const Vector& v) const;
  Matrix transpose() const;
  Matrix multiply(const Matrix& other) const;

  double max_abs() const;
  // Largest |A(i,j) - A(j,i)| over all pairs; 0 for non-square never applies.
  double asymmetry() const;
  bool is_symmetric(double tol) const;

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Factorizations and solvers
// ---------------------------------------------------------------------------

// Cholesky factor of an SPD matrix; throws NotSpdError when a pivot fails.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const Matrix& a);
  Vector solve(const Vector& b) const;
  Index dim() const { return n_; }

 private:
  Index n_ = 0;
  Matrix l_;
};

// Solves A x = b for symmetric (to 1e-12 relative) positive definite A.
// Postcondition: ||Ax - b|| <= 1e-10 (1 + ||b||).
Vector solve_spd(const Matrix& a, const Vector& b);

struct MinNormSolution {
  Vector y;
  double residual = 0.0;
  int rank = 0;
};

// Minimum-norm least-squares solution of A y = g for symmetric PSD A,
// truncating eigenvalues below rank_tol * lambda_max.
MinNormSolution min_norm_solve(const Matrix& a, const Vector& g,
                               double rank_tol = 1e-10);

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, A = V diag(values) V^T
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix.
SymmetricEigen jacobi_eigen(const Matrix& a);

struct SpectralEstimates {
  double largest = 0.0;
  double smallest_positive = 0.0;
};

// Power / deflated inverse power iteration on a symmetric PSD matrix,
// relative tolerance 1e-8, at most 10000 iterations. smallest_positive
// ignores eigenvalues below rank_tol * largest. Throws
// SpectralConvergenceError carrying the best estimate on non-convergence.
SpectralEstimates spectral_estimates(const Matrix& a, double rank_tol = 1e-10);

// Largest eigenvalue of a symmetric PSD operator given only its action.
double power_iteration_largest(const std::function<Vector(const Vector&)>& apply,
                               Index n, double rel_tol = 1e-8,
                               int max_iter = 10000);

// ---------------------------------------------------------------------------
// Linear operators: dense, inverse of an SPD tridiagonal, vertical stacks
// ---------------------------------------------------------------------------

class LinearOperator {
 public:
  struct DenseOp {
    Matrix m;
  };
  // Represents T^{-1} for an SPD tridiagonal T with main diagonal `diag` and
  // off diagonal `off`; the LDL^T factorization is cached at construction and
  // each apply performs one tridiagonal solve.
  struct TridiagonalInverseOp {
    Vector diag;
    Vector off;
    Vector factor_d;  // pivots of LDL^T
    Vector factor_l;  // subdiagonal multipliers
  };
  struct StackOp {
    std::vector<LinearOperator> blocks;
  };
  using Node = std::variant<DenseOp, TridiagonalInverseOp, StackOp>;

  static LinearOperator dense(Matrix m);
  static LinearOperator tridiagonal_inverse(Vector diag, Vector off);
  static LinearOperator stack(std::vector<LinearOperator> blocks);
  static LinearOperator identity(Index n);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  Vector apply(const Vector& v) const;
  Vector apply_adjoint(const Vector& w) const;

  // Materializes the operator column by column.
  Matrix dense_matrix() const;
  // S^T S as a dense matrix.
  Matrix gram() const;
  // S S^T as a dense matrix.
  Matrix outer_gram() const;
  // lambda_max(S^T S), via power iteration on the operator action.
  double norm_bound_sq() const;

  const Node& node() const { return *node_; }

 private:
  LinearOperator(Node node, Index rows, Index cols);
  std::shared_ptr<const Node> node_;
  Index rows_ = 0;
  Index cols_ = 0;
};

// Spectral estimates taken on S^T S when the operator is not symmetric.
SpectralEstimates spectral_estimates(const LinearOperator& op,
                                     double rank_tol = 1e-10);

// Matrix action of `op` (adjoint action when `adjoint` is set) with
// dimension checking.
Vector operator_apply(const LinearOperator& op, const Vector& v,
                      bool adjoint = false);

}  // namespace almlab
