#include "almlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace almlab {

namespace {

void require_same_dim(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
}

double portable_u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Vector deterministic_start(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = portable_u01(rng) - 0.5 + 1e-3;
  double s = norm(x);
  if (s == 0.0) x[0] = 1.0;
  else for (auto& v : x) v /= s;
  return x;
}

}  // namespace

double dot(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "dot");
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_sq(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double norm(const Vector& v) { return std::sqrt(norm_sq(v)); }

double linf_norm(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Vector add(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "add");
  Vector r(a.size());
  for (Index i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vector sub(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "sub");
  Vector r(a.size());
  for (Index i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vector scaled(const Vector& v, double s) {
  Vector r(v.size());
  for (Index i = 0; i < v.size(); ++i) r[i] = v[i] * s;
  return r;
}

void axpy(double s, const Vector& x, Vector& y) {
  require_same_dim(x, y, "axpy");
  for (Index i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

Vector zeros(Index n) { return Vector(n, 0.0); }

Vector unit(Index n, Index i) {
  Vector e(n, 0.0);
  e[i] = 1.0;
  return e;
}

bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

Matrix::Matrix(Index rows, Index cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(Index n) {
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return Matrix();
  Matrix m(rows.size(), rows.front().size());
  for (Index i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols())
      throw DimensionError("from_rows: ragged rows");
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Vector Matrix::apply(const Vector& v) const {
  if (v.size() != cols_) throw DimensionError("Matrix::apply: dimension mismatch");
  Vector r(rows_, 0.0);
  for (Index i = 0; i < rows_; ++i) {
    double s = 0.0;
    const double* row = data_.data() + i * cols_;
    for (Index j = 0; j < cols_; ++j) s += row[j] * v[j];
    r[i] = s;
  }
  return r;
}

Vector Matrix::apply_transpose(const Vector& v) const {
  if (v.size() != rows_)
    throw DimensionError("Matrix::apply_transpose: dimension mismatch");
  Vector r(cols_, 0.0);
  for (Index i = 0; i < rows_; ++i) {
    const double* row = data_.data() + i * cols_;
    const double vi = v[i];
    for (Index j = 0; j < cols_; ++j) r[j] += row[j] * vi;
  }
  return r;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (Index i = 0; i < rows_; ++i)
    for (Index j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::multiply(const Matrix& other) const {
  if (cols_ != other.rows_)
    throw DimensionError("Matrix::multiply: inner dimension mismatch");
  Matrix r(rows_, other.cols_);
  for (Index i = 0; i < rows_; ++i) {
    for (Index k = 0; k < cols_; ++k) {
      const double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (Index j = 0; j < other.cols_; ++j) r(i, j) += aik * other(k, j);
    }
  }
  return r;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

double Matrix::asymmetry() const {
  if (rows_ != cols_) throw DimensionError("asymmetry: matrix not square");
  double m = 0.0;
  for (Index i = 0; i < rows_; ++i)
    for (Index j = i + 1; j < cols_; ++j)
      m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
  return m;
}

bool Matrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  return asymmetry() <= tol * (1.0 + max_abs());
}

// ---------------------------------------------------------------------------
// Cholesky
// ---------------------------------------------------------------------------

CholeskyFactor::CholeskyFactor(const Matrix& a) : n_(a.rows()), l_(a.rows(), a.cols()) {
  if (a.rows() != a.cols()) throw DimensionError("cholesky: matrix not square");
  const Index n = n_;
  for (Index j = 0; j < n; ++j) {
    double d = a(j, j);
    for (Index k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
    if (!(d > 0.0) || !std::isfinite(d))
      throw NotSpdError("cholesky: non-positive pivot at column " + std::to_string(j));
    const double ljj = std::sqrt(d);
    l_(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Index k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
      l_(i, j) = s / ljj;
    }
  }
}

Vector CholeskyFactor::solve(const Vector& b) const {
  if (b.size() != n_) throw DimensionError("cholesky solve: dimension mismatch");
  Vector y(n_);
  for (Index i = 0; i < n_; ++i) {
    double s = b[i];
    for (Index k = 0; k < i; ++k) s -= l_(i, k) * y[k];
    y[i] = s / l_(i, i);
  }
  Vector x(n_);
  for (Index ii = n_; ii-- > 0;) {
    double s = y[ii];
    for (Index k = ii + 1; k < n_; ++k) s -= l_(k, ii) * x[k];
    x[ii] = s / l_(ii, ii);
  }
  return x;
}

Vector solve_spd(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols()) throw DimensionError("solve_spd: matrix not square");
  if (!a.is_symmetric(1e-12))
    throw NotSpdError("solve_spd: matrix not symmetric within 1e-12");
  CholeskyFactor chol(a);
  return chol.solve(b);
}

// ---------------------------------------------------------------------------
// Jacobi eigendecomposition
// ---------------------------------------------------------------------------

SymmetricEigen jacobi_eigen(const Matrix& a_in) {
  if (a_in.rows() != a_in.cols())
    throw DimensionError("jacobi_eigen: matrix not square");
  const Index n = a_in.rows();
  Matrix a = a_in;
  Matrix v = Matrix::identity(n);
  const double scale = std::max(a.max_abs(), 1e-300);

  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= 1e-15 * scale) break;

    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-18 * scale) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Index i = 0; i < n; ++i) {
          if (i != p && i != q) {
            const double aip = a(i, p), aiq = a(i, q);
            a(i, p) = aip - s * (aiq + tau * aip);
            a(p, i) = a(i, p);
            a(i, q) = aiq + s * (aip - tau * aiq);
            a(q, i) = a(i, q);
          }
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = vip - s * (viq + tau * vip);
          v(i, q) = viq + s * (vip - tau * viq);
        }
      }
    }
  }

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index i, Index j) { return a(i, i) < a(j, j); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (Index j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (Index i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Min-norm least squares
// ---------------------------------------------------------------------------

MinNormSolution min_norm_solve(const Matrix& a, const Vector& g, double rank_tol) {
  if (a.rows() != a.cols()) throw DimensionError("min_norm_solve: matrix not square");
  if (g.size() != a.rows()) throw DimensionError("min_norm_solve: rhs dimension");
  const Index n = a.rows();
  SymmetricEigen eig = jacobi_eigen(a);
  double lam_max = 0.0;
  for (double l : eig.values) lam_max = std::max(lam_max, std::abs(l));
  const double tau = rank_tol * lam_max;

  MinNormSolution out;
  out.y = zeros(n);
  for (Index j = 0; j < n; ++j) {
    const double lam = eig.values[j];
    if (std::abs(lam) <= tau || lam == 0.0) continue;
    ++out.rank;
    double coeff = 0.0;
    for (Index i = 0; i < n; ++i) coeff += eig.vectors(i, j) * g[i];
    coeff /= lam;
    for (Index i = 0; i < n; ++i) out.y[i] += coeff * eig.vectors(i, j);
  }
  out.residual = norm(sub(a.apply(out.y), g));
  return out;
}

// ---------------------------------------------------------------------------
// Spectral estimates
// ---------------------------------------------------------------------------

double power_iteration_largest(const std::function<Vector(const Vector&)>& apply,
                               Index n, double rel_tol, int max_iter) {
  if (n == 0) return 0.0;
  Vector x = deterministic_start(n, 0x9e3779b97f4a7c15ull);
  double rho = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector y = apply(x);
    const double rho_next = dot(x, y);
    const double yn = norm(y);
    if (yn <= 1e-300) return 0.0;  // zero operator
    for (auto& v : y) v /= yn;
    if (it > 0 && std::abs(rho_next - rho) <= rel_tol * std::max(std::abs(rho_next), 1e-300)) {
      return rho_next;
    }
    rho = rho_next;
    x = std::move(y);
  }
  throw SpectralConvergenceError("power iteration did not converge", rho);
}

SpectralEstimates spectral_estimates(const Matrix& a, double rank_tol) {
  if (a.rows() != a.cols())
    throw DimensionError("spectral_estimates: matrix not square");
  const Index n = a.rows();
  SpectralEstimates out;
  out.largest =
      power_iteration_largest([&](const Vector& v) { return a.apply(v); }, n);
  if (out.largest <= 0.0) {
    out.largest = 0.0;
    out.smallest_positive = 0.0;
    return out;
  }

  const double tau = rank_tol * out.largest;
  SymmetricEigen eig = jacobi_eigen(a);
  std::vector<Index> kernel;
  for (Index j = 0; j < n; ++j)
    if (eig.values[j] <= tau) kernel.push_back(j);
  if (kernel.size() == n) {
    out.smallest_positive = 0.0;
    return out;
  }

  // Inverse power iteration on A + tau I, iterates kept orthogonal to the
  // numerical kernel.
  Matrix shifted = a;
  for (Index i = 0; i < n; ++i) shifted(i, i) += tau;
  CholeskyFactor chol(shifted);
  auto deflate = [&](Vector v) {
    for (Index j : kernel) {
      double c = 0.0;
      for (Index i = 0; i < n; ++i) c += eig.vectors(i, j) * v[i];
      for (Index i = 0; i < n; ++i) v[i] -= c * eig.vectors(i, j);
    }
    return v;
  };
  const double rho = power_iteration_largest(
      [&](const Vector& v) { return deflate(chol.solve(deflate(v))); }, n);
  out.smallest_positive = 1.0 / rho - tau;
  return out;
}

// ---------------------------------------------------------------------------
// LinearOperator
// ---------------------------------------------------------------------------

LinearOperator::LinearOperator(Node node, Index rows, Index cols)
    : node_(std::make_shared<Node>(std::move(node))), rows_(rows), cols_(cols) {}

LinearOperator LinearOperator::dense(Matrix m) {
  const Index r = m.rows(), c = m.cols();
  return LinearOperator(DenseOp{std::move(m)}, r, c);
}

LinearOperator LinearOperator::tridiagonal_inverse(Vector diag, Vector off) {
  const Index n = diag.size();
  if (n == 0) throw DimensionError("tridiagonal_inverse: empty diagonal");
  if (off.size() + 1 != n)
    throw DimensionError("tridiagonal_inverse: off diagonal must have n-1 entries");
  TridiagonalInverseOp op;
  op.diag = std::move(diag);
  op.off = std::move(off);
  // LDL^T factorization; SPD iff every pivot is positive.
  op.factor_d.resize(n);
  op.factor_l.resize(n > 0 ? n - 1 : 0);
  op.factor_d[0] = op.diag[0];
  if (!(op.factor_d[0] > 0.0))
    throw NotSpdError("tridiagonal_inverse: matrix not positive definite");
  for (Index i = 1; i < n; ++i) {
    op.factor_l[i - 1] = op.off[i - 1] / op.factor_d[i - 1];
    op.factor_d[i] = op.diag[i] - op.factor_l[i - 1] * op.off[i - 1];
    if (!(op.factor_d[i] > 0.0) || !std::isfinite(op.factor_d[i]))
      throw NotSpdError("tridiagonal_inverse: matrix not positive definite");
  }
  return LinearOperator(std::move(op), n, n);
}

LinearOperator LinearOperator::stack(std::vector<LinearOperator> blocks) {
  if (blocks.empty()) throw DimensionError("stack: no blocks");
  const Index cols = blocks.front().cols();
  Index rows = 0;
  for (const auto& b : blocks) {
    if (b.cols() != cols) throw DimensionError("stack: blocks disagree on cols");
    rows += b.rows();
  }
  return LinearOperator(StackOp{std::move(blocks)}, rows, cols);
}

LinearOperator LinearOperator::identity(Index n) {
  if (n <= 512) return dense(Matrix::identity(n));
  // Large identity realized as the inverse of the unit tridiagonal.
  return tridiagonal_inverse(Vector(n, 1.0), Vector(n - 1, 0.0));
}

Vector LinearOperator::apply(const Vector& v) const {
  if (v.size() != cols_) throw DimensionError("LinearOperator::apply: dimension");
  if (const auto* d = std::get_if<DenseOp>(node_.get())) return d->m.apply(v);
  if (const auto* t = std::get_if<TridiagonalInverseOp>(node_.get())) {
    const Index n = t->diag.size();
    Vector x(v);
    for (Index i = 1; i < n; ++i) x[i] -= t->factor_l[i - 1] * x[i - 1];
    for (Index i = 0; i < n; ++i) x[i] /= t->factor_d[i];
    for (Index i = n - 1; i-- > 0;) x[i] -= t->factor_l[i] * x[i + 1];
    return x;
  }
  const auto& s = std::get<StackOp>(*node_);
  Vector out;
  out.reserve(rows_);
  for (const auto& b : s.blocks) {
    Vector part = b.apply(v);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

Vector LinearOperator::apply_adjoint(const Vector& w) const {
  if (w.size() != rows_)
    throw DimensionError("LinearOperator::apply_adjoint: dimension");
  if (const auto* d = std::get_if<DenseOp>(node_.get()))
    return d->m.apply_transpose(w);
  if (std::holds_alternative<TridiagonalInverseOp>(*node_)) {
    return apply(w);  // T^{-1} is symmetric
  }
  const auto& s = std::get<StackOp>(*node_);
  Vector out = zeros(cols_);
  Index offset = 0;
  for (const auto& b : s.blocks) {
    Vector slice(w.begin() + offset, w.begin() + offset + b.rows());
    axpy(1.0, b.apply_adjoint(slice), out);
    offset += b.rows();
  }
  return out;
}

Matrix LinearOperator::dense_matrix() const {
  Matrix m(rows_, cols_);
  for (Index j = 0; j < cols_; ++j) {
    Vector col = apply(unit(cols_, j));
    for (Index i = 0; i < rows_; ++i) m(i, j) = col[i];
  }
  return m;
}

Matrix LinearOperator::gram() const {
  // Columns of S, then G = W^T W.
  std::vector<Vector> w(cols_);
  for (Index j = 0; j < cols_; ++j) w[j] = apply(unit(cols_, j));
  Matrix g(cols_, cols_);
  for (Index i = 0; i < cols_; ++i) {
    for (Index j = i; j < cols_; ++j) {
      const double v = dot(w[i], w[j]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

Matrix LinearOperator::outer_gram() const {
  Matrix s = dense_matrix();
  Matrix g(rows_, rows_);
  for (Index i = 0; i < rows_; ++i) {
    for (Index j = i; j < rows_; ++j) {
      double v = 0.0;
      for (Index k = 0; k < cols_; ++k) v += s(i, k) * s(j, k);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

double LinearOperator::norm_bound_sq() const {
  return power_iteration_largest(
      [&](const Vector& v) { return apply_adjoint(apply(v)); }, cols_);
}

SpectralEstimates spectral_estimates(const LinearOperator& op, double rank_tol) {
  if (op.cols() > 1024)
    throw InvalidInputError("spectral_estimates: operator too large to densify");
  return spectral_estimates(op.gram(), rank_tol);
}

Vector operator_apply(const LinearOperator& op, const Vector& v, bool adjoint) {
  return adjoint ? op.apply_adjoint(v) : op.apply(v);
}

}  // namespace almlab
