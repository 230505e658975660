#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace drf::linalg {

// Dense row-major matrix. Sizes here are small (tens of rows), so value
// semantics everywhere.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double> col(std::size_t c) const;
  const std::vector<double>& data() const { return data_; }

  Matrix transpose() const;
  double trace() const;
  double max_abs() const;
  double frobenius() const;

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  friend Matrix operator*(double s, const Matrix& a);
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::vector<double> multiply(const Matrix& a, std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

// Aᵀ A for a tall data matrix.
Matrix gram(const Matrix& a);
// (A + Aᵀ) / 2.
Matrix symmetrize(const Matrix& a);
bool is_symmetric(const Matrix& a, double rel_tol = 1e-12);

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;  // unit 2-norm
};

// Full spectrum of a symmetric matrix by cyclic Jacobi, ascending by value.
// Vectors are orthonormal; each is sign-normalized so its largest-magnitude
// component is positive. Throws LinalgError on non-symmetric input.
std::vector<EigenPair> sym_eig(const Matrix& a);

// Lower-triangular L with L Lᵀ = A, or nullopt when some pivot falls to
// 1e-12 * trace(A) / d or below (A not numerically positive definite).
std::optional<Matrix> cholesky(const Matrix& a);

// Σ 2 ln L_ii. Throws LinalgError when the Cholesky factorization fails.
double log_det_psd(const Matrix& a);

// Solves A x = b given the Cholesky factor of A.
std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b);

// Orthonormal columns spanning the eigenvectors with eigenvalue at most
// tol * λ_max. A zero matrix yields the whole space; full rank yields a
// d x 0 matrix.
Matrix null_space_basis(const Matrix& p, double tol = 1e-10);

// All pairs of num · v = λ · den · v with den positive definite, ascending by
// λ, vectors scaled to unit 2-norm. Throws LinalgError if den is not PD.
std::vector<EigenPair> generalized_sym_eig(const Matrix& num, const Matrix& den);

struct Regularization {
  enum class Mode { none, tikhonov, nullspace };
  Mode mode = Mode::none;
  // tikhonov: δ added to the diagonal of a denominator that fails Cholesky.
  // When `relative` is set, δ = delta * trace(H) / dim(H).
  double delta = 0.0;
  bool relative = false;
  double null_tol = 1e-10;

  static Regularization none() { return {}; }
  static Regularization tikhonov(double delta) { return {Mode::tikhonov, delta, false}; }
  static Regularization tikhonov_relative(double scale) { return {Mode::tikhonov, scale, true}; }
  static Regularization nullspace(double tol = 1e-10) { return {Mode::nullspace, 0.0, false, tol}; }
};

// Minimizer of rᵀ·num·r / rᵀ·den·r.
//  - nullspace mode with a rank-deficient numerator: the unit vector of the
//    numerator's null space maximizing rᵀ·den·r;
//  - den PD: smallest generalized eigenvector;
//  - den singular, num PD: largest eigenvector of the swapped pair;
//  - both singular: tikhonov regularizes den, other modes throw.
// The returned value is the attained quotient (+inf when rᵀ·den·r = 0).
EigenPair min_rayleigh_quotient(const Matrix& num, const Matrix& den, const Regularization& reg);

struct RayleighPair {
  EigenPair min;  // minimizes rᵀPr / rᵀQr
  EigenPair max;  // minimizes rᵀQr / rᵀPr (largest λ of P r = λ Q r)
};

// Both clustering planes of the pair (P, Q). When Q is positive definite and
// no null-space step is triggered, one decomposition of P r = λ Q r yields
// both extremes; otherwise each problem is solved with its own denominator.
RayleighPair solve_generalized_rayleigh(const Matrix& p, const Matrix& q, const Regularization& reg);

double rayleigh_quotient(const Matrix& num, const Matrix& den, std::span<const double> r);

}  // namespace drf::linalg
