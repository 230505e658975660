#include "drf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "drf/error.hpp"

namespace drf::linalg {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw LinalgError("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

std::vector<double> Matrix::col(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double Matrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
  return s;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::frobenius() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.rows_) throw LinalgError("matrix product dimension mismatch");
  Matrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw LinalgError("matrix sum dimension mismatch");
  Matrix out = a;
  for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += b.data_[i];
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) { return a + (-1.0) * b; }

Matrix operator*(double s, const Matrix& a) {
  Matrix out = a;
  for (double& v : out.data_) v *= s;
  return out;
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw LinalgError("matrix-vector dimension mismatch");
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), x);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Matrix gram(const Matrix& a) {
  const std::size_t d = a.cols();
  Matrix g(d, d);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto row = a.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      const double ri = row[i];
      for (std::size_t j = i; j < d; ++j) g(i, j) += ri * row[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

Matrix symmetrize(const Matrix& a) {
  Matrix s = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double bound = rel_tol * a.max_abs();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > bound) return false;
  return true;
}

namespace {

void normalize_sign(std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  if (!v.empty() && v[best] < 0.0)
    for (double& x : v) x = -x;
}

void normalize_unit(std::vector<double>& v) {
  const double n = norm2(v);
  if (n > 0.0)
    for (double& x : v) x /= n;
}

// Solves L x = b (forward substitution).
std::vector<double> forward_solve(const Matrix& lower, std::span<const double> b) {
  const std::size_t n = lower.rows();
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) x[i] -= lower(i, k) * x[k];
    x[i] /= lower(i, i);
  }
  return x;
}

// Solves Lᵀ x = b (back substitution).
std::vector<double> backward_solve(const Matrix& lower, std::span<const double> b) {
  const std::size_t n = lower.rows();
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < n; ++k) x[ii] -= lower(k, ii) * x[k];
    x[ii] /= lower(ii, ii);
  }
  return x;
}

void check_square_pair(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw LinalgError("dimension mismatch between matrix pair");
}

double attained_quotient(const Matrix& num, const Matrix& den, std::span<const double> r) {
  const double d = dot(r, multiply(den, r));
  const double n = dot(r, multiply(num, r));
  if (d <= 0.0) return std::numeric_limits<double>::infinity();
  return n / d;
}

// Null-space step: restrict the search to null(num) and maximize the
// denominator form there. Returns nullopt when the basis is empty.
std::optional<EigenPair> null_space_minimizer(const Matrix& num, const Matrix& den, double tol) {
  Matrix basis = null_space_basis(num, tol);
  if (basis.cols() == 0) return std::nullopt;
  Matrix projector = basis * basis.transpose();
  Matrix projected = symmetrize(projector * den * projector);
  auto pairs = sym_eig(projected);
  const EigenPair& top = pairs.back();
  if (top.value <= 0.0) throw LinalgError("denominator vanishes on the numerator's null space");
  EigenPair out{0.0, top.vector};
  out.value = attained_quotient(num, den, out.vector);
  return out;
}

double tikhonov_delta(const Matrix& h, const Regularization& reg) {
  double delta = reg.delta;
  if (reg.relative) delta *= h.trace() / static_cast<double>(h.rows());
  if (!(delta > 0.0)) throw LinalgError("tikhonov regularization requires a positive delta");
  return delta;
}

}  // namespace

std::vector<EigenPair> sym_eig(const Matrix& input) {
  if (!is_symmetric(input)) throw LinalgError("sym_eig: matrix is not symmetric");
  const std::size_t n = input.rows();
  Matrix a = symmetrize(input);
  Matrix v = Matrix::identity(n);

  const double scale = a.frobenius();
  for (int sweep = 0; sweep < 100 && scale > 0.0; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-15 * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<EigenPair> pairs(n);
  for (std::size_t i = 0; i < n; ++i) {
    pairs[i].value = a(i, i);
    pairs[i].vector = v.col(i);
    normalize_unit(pairs[i].vector);
    normalize_sign(pairs[i].vector);
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const EigenPair& x, const EigenPair& y) { return x.value < y.value; });
  return pairs;
}

std::optional<Matrix> cholesky(const Matrix& a) {
  if (a.rows() != a.cols()) throw LinalgError("cholesky: matrix is not square");
  const std::size_t n = a.rows();
  if (n == 0) return Matrix();
  const double floor = 1e-12 * a.trace() / static_cast<double>(n);
  if (!(floor > 0.0)) return std::nullopt;
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > floor)) return std::nullopt;
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

double log_det_psd(const Matrix& a) {
  auto l = cholesky(a);
  if (!l) throw LinalgError("log_det_psd: matrix is not positive definite");
  double s = 0.0;
  for (std::size_t i = 0; i < l->rows(); ++i) s += 2.0 * std::log((*l)(i, i));
  return s;
}

std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b) {
  return backward_solve(lower, forward_solve(lower, b));
}

Matrix null_space_basis(const Matrix& p, double tol) {
  const std::size_t d = p.rows();
  auto pairs = sym_eig(p);
  const double lambda_max = pairs.empty() ? 0.0 : pairs.back().value;
  std::vector<const EigenPair*> kept;
  for (const auto& e : pairs)
    if (lambda_max <= 0.0 || e.value <= tol * lambda_max) kept.push_back(&e);
  Matrix basis(d, kept.size());
  for (std::size_t c = 0; c < kept.size(); ++c)
    for (std::size_t r = 0; r < d; ++r) basis(r, c) = kept[c]->vector[r];
  return basis;
}

std::vector<EigenPair> generalized_sym_eig(const Matrix& num, const Matrix& den) {
  check_square_pair(num, den);
  auto lower = cholesky(den);
  if (!lower) throw LinalgError("generalized eigenproblem: denominator is not positive definite");
  const std::size_t n = num.rows();

  // C = L⁻¹ num L⁻ᵀ, built column by column.
  Matrix half(n, n);  // L⁻¹ num
  for (std::size_t c = 0; c < n; ++c) {
    auto x = forward_solve(*lower, num.col(c));
    for (std::size_t r = 0; r < n; ++r) half(r, c) = x[r];
  }
  Matrix reduced(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    auto x = forward_solve(*lower, half.row(c));
    for (std::size_t r = 0; r < n; ++r) reduced(r, c) = x[r];
  }
  auto pairs = sym_eig(symmetrize(reduced));
  for (auto& e : pairs) {
    e.vector = backward_solve(*lower, e.vector);
    normalize_unit(e.vector);
    normalize_sign(e.vector);
  }
  return pairs;
}

EigenPair min_rayleigh_quotient(const Matrix& num, const Matrix& den, const Regularization& reg) {
  check_square_pair(num, den);
  using Mode = Regularization::Mode;
  if (reg.mode == Mode::nullspace && !cholesky(num)) {
    if (auto r = null_space_minimizer(num, den, reg.null_tol)) return *r;
  }
  if (cholesky(den)) return generalized_sym_eig(num, den).front();

  switch (reg.mode) {
    case Mode::tikhonov: {
      const double delta = tikhonov_delta(den, reg);
      Matrix regularized = den + delta * Matrix::identity(den.rows());
      return generalized_sym_eig(num, regularized).front();
    }
    case Mode::nullspace:
      if (cholesky(num)) {
        EigenPair e = generalized_sym_eig(den, num).back();
        e.value = attained_quotient(num, den, e.vector);
        return e;
      }
      break;
    case Mode::none:
      break;
  }
  throw LinalgError("Rayleigh quotient: denominator is not positive definite");
}

RayleighPair solve_generalized_rayleigh(const Matrix& p, const Matrix& q, const Regularization& reg) {
  check_square_pair(p, q);
  using Mode = Regularization::Mode;
  if (cholesky(q)) {
    auto pairs = generalized_sym_eig(p, q);
    RayleighPair out{pairs.front(), pairs.back()};
    if (reg.mode == Mode::nullspace && !cholesky(p)) {
      if (auto r = null_space_minimizer(p, q, reg.null_tol)) out.min = *r;
    }
    return out;
  }
  if (reg.mode == Mode::none) throw LinalgError("Rayleigh pair: Q is not positive definite");

  RayleighPair out;
  out.min = min_rayleigh_quotient(p, q, reg);
  out.max = min_rayleigh_quotient(q, p, reg);
  out.max.value = out.max.value > 0.0 ? 1.0 / out.max.value : std::numeric_limits<double>::infinity();
  return out;
}

double rayleigh_quotient(const Matrix& num, const Matrix& den, std::span<const double> r) {
  return attained_quotient(num, den, r);
}

}  // namespace drf::linalg
