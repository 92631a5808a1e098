// Copyright 2026 The privmoment Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense symmetric linear algebra used by every estimator: a packed symmetric
// matrix type, a deterministic Jacobi eigensolver, Loewner-order checks,
// spectral functions and the relative spectral semimetric.

#ifndef PRIVMOMENT_LINALG_HPP_
#define PRIVMOMENT_LINALG_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace privmoment {

using Vector = std::vector<double>;

/// Dense row-major matrix. Used for eigenvector bases, point sets and the
/// non-symmetric Gaussian matrices of the baseline estimator.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  Vector column(std::size_t j) const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// Symmetric d x d matrix stored as its packed upper triangle (row-major),
/// d(d+1)/2 entries. Symmetry holds by construction.
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(std::size_t dim);

  static SymMat identity(std::size_t dim, double scale = 1.0);
  static SymMat diagonal(std::span<const double> diag);
  static SymMat diagonal(std::initializer_list<double> diag);
  /// Builds from a full square matrix; throws if it is not symmetric to
  /// within `tol` (absolute, entrywise).
  static SymMat from_dense(const Matrix& m, double tol = 0.0);
  static SymMat from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t dim() const { return dim_; }

  double operator()(std::size_t i, std::size_t j) const { return packed_[index(i, j)]; }
  double& at(std::size_t i, std::size_t j) { return packed_[index(i, j)]; }

  std::span<const double> packed() const { return packed_; }
  std::span<double> packed() { return packed_; }

  Matrix to_dense() const;
  bool all_finite() const;
  double frobenius_norm() const;

  SymMat& operator+=(const SymMat& other);
  SymMat& operator-=(const SymMat& other);
  SymMat& operator*=(double s);

  friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
  friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
  friend SymMat operator*(SymMat a, double s) { return a *= s; }
  friend SymMat operator*(double s, SymMat a) { return a *= s; }
  friend bool operator==(const SymMat&, const SymMat&) = default;

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return i * dim_ - (i * (i - 1)) / 2 + (j - i);
  }

  std::size_t dim_ = 0;
  std::vector<double> packed_;
};

/// Spectral factorization M = Q diag(values) Q^T with values sorted
/// descending and column i of `vectors` paired with values[i].
struct EigenDecomp {
  Vector values;
  Matrix vectors;

  std::size_t dim() const { return values.size(); }
  Vector vector(std::size_t i) const { return vectors.column(i); }
};

/// Cyclic Jacobi eigensolver. Converges when the off-diagonal Frobenius mass
/// drops below 1e-12 * ||M||_F; throws NumericalFailure after 100 sweeps.
/// Eigenvectors are sign-normalized so their first non-negligible component
/// is positive, making the output a deterministic function of the input.
EigenDecomp eig_sym(const SymMat& m);

/// Rebuilds Q diag(f(lambda)) Q^T from a decomposition.
template <class F>
SymMat spectral_map(const EigenDecomp& e, F&& f);

SymMat reconstruct(const EigenDecomp& e);

double spectral_norm(const SymMat& m);
double min_eigenvalue(const SymMat& m);
double max_eigenvalue(const SymMat& m);

/// 1e-9 * max(1, ||M||_2): slack used when asserting a matrix is PSD.
double psd_tolerance(const SymMat& m);
/// 1e-12 * max(1, ||M||_2): eigenvalues at or below this count as zero.
double rank_tolerance(const SymMat& m);

bool is_psd(const SymMat& m);

/// True iff A <= B in Loewner order, i.e. lambda_min(B - A) >= -tol.
bool loewner_leq(const SymMat& a, const SymMat& b, double tol);

/// Q diag(lambda^{-1/2}) Q^T. Throws NotPositiveDefinite when an eigenvalue is
/// below `floor` (which must be positive).
SymMat inv_sqrt(const SymMat& m, double floor);

/// Principal square root of a PSD matrix; eigenvalues within psd_tolerance
/// below zero are clamped to zero, anything more negative throws.
SymMat sqrt_psd(const SymMat& m);

/// P M P for symmetric P.
SymMat congruence(const SymMat& p, const SymMat& m);
/// A M A^T for a general square A.
SymMat congruence(const Matrix& a, const SymMat& m);

/// max{||A^{-1/2} B A^{-1/2} - I||, ||B^{-1/2} A B^{-1/2} - I||}; +infinity if
/// either argument has an eigenvalue at or below its rank_tolerance.
double spectral_dist(const SymMat& a, const SymMat& b);

/// spectral_dist with precomputed inverse square roots (rank checks must
/// already have been done by the caller).
double spectral_dist_prepared(const SymMat& a, const SymMat& a_inv_sqrt,
                              const SymMat& b, const SymMat& b_inv_sqrt);

/// ||Sigma^{-1/2} Estimate Sigma^{-1/2} - I||_2. Sigma must be positive
/// definite (eigenvalues above its rank_tolerance).
double rel_spectral_error(const SymMat& sigma, const SymMat& estimate);

/// The linear contraction eta * P_V + P_{V-perp} and its inverse.
struct ShrinkMap {
  SymMat forward;
  SymMat inverse;
};

/// Builds the contraction for an orthonormal basis of V (each vector of
/// length d). Throws std::invalid_argument if the basis Gram matrix deviates
/// from the identity by more than 1e-8, or eta is outside (0, 1).
ShrinkMap shrink_map(std::span<const Vector> basis, double eta, std::size_t d);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
Vector multiply(const SymMat& m, std::span<const double> v);
/// x^T M x
double quadratic_form(const SymMat& m, std::span<const double> x);

// ---------------------------------------------------------------------------

template <class F>
SymMat spectral_map(const EigenDecomp& e, F&& f) {
  const std::size_t d = e.dim();
  SymMat out(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double w = f(e.values[k]);
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) {
      const double qi = e.vectors(i, k) * w;
      if (qi == 0.0) continue;
      for (std::size_t j = i; j < d; ++j) out.at(i, j) += qi * e.vectors(j, k);
    }
  }
  return out;
}

}  // namespace privmoment

#endif  // PRIVMOMENT_LINALG_HPP_
