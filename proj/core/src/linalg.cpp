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

#include "privmoment/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "privmoment/errors.hpp"

namespace privmoment {
namespace {

constexpr int kMaxSweeps = 100;
constexpr double kJacobiRelTol = 1e-12;
constexpr double kGramTol = 1e-8;

void require_same_dim(const SymMat& a, const SymMat& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch(std::string(what) + ": dimension mismatch (" +
                            std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()) + ")");
  }
}

double max_abs_eigenvalue(const EigenDecomp& e) {
  if (e.values.empty()) return 0.0;
  return std::max(std::abs(e.values.front()), std::abs(e.values.back()));
}

// ||S - I||_2 for symmetric S, via its eigenvalues.
double distance_from_identity(const SymMat& s) {
  const EigenDecomp e = eig_sym(s);
  if (e.values.empty()) return 0.0;
  return std::max(std::abs(e.values.front() - 1.0), std::abs(e.values.back() - 1.0));
}

}  // namespace

// --- Matrix ----------------------------------------------------------------

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("multiply: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

// --- SymMat ----------------------------------------------------------------

SymMat::SymMat(std::size_t dim) : dim_(dim), packed_(dim * (dim + 1) / 2, 0.0) {}

SymMat SymMat::identity(std::size_t dim, double scale) {
  SymMat m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = scale;
  return m;
}

SymMat SymMat::diagonal(std::span<const double> diag) {
  SymMat m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.at(i, i) = diag[i];
  return m;
}

SymMat SymMat::diagonal(std::initializer_list<double> diag) {
  return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

SymMat SymMat::from_dense(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw DimensionMismatch("SymMat::from_dense: matrix not square");
  SymMat out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol) {
        throw std::invalid_argument("SymMat::from_dense: matrix not symmetric at (" +
                                    std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      out.at(i, j) = m(i, j);
    }
  }
  return out;
}

SymMat SymMat::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix dense(rows.size(), rows.size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    if (r.size() != rows.size()) throw DimensionMismatch("SymMat::from_rows: ragged rows");
    std::size_t j = 0;
    for (double v : r) dense(i, j++) = v;
    ++i;
  }
  return from_dense(dense);
}

Matrix SymMat::to_dense() const {
  Matrix out(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j) out(i, j) = out(j, i) = (*this)(i, j);
  return out;
}

bool SymMat::all_finite() const {
  return std::all_of(packed_.begin(), packed_.end(), [](double v) { return std::isfinite(v); });
}

double SymMat::frobenius_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i; j < dim_; ++j) {
      const double v = (*this)(i, j);
      s += (i == j ? 1.0 : 2.0) * v * v;
    }
  }
  return std::sqrt(s);
}

SymMat& SymMat::operator+=(const SymMat& other) {
  require_same_dim(*this, other, "SymMat::operator+=");
  for (std::size_t k = 0; k < packed_.size(); ++k) packed_[k] += other.packed_[k];
  return *this;
}

SymMat& SymMat::operator-=(const SymMat& other) {
  require_same_dim(*this, other, "SymMat::operator-=");
  for (std::size_t k = 0; k < packed_.size(); ++k) packed_[k] -= other.packed_[k];
  return *this;
}

SymMat& SymMat::operator*=(double s) {
  for (double& v : packed_) v *= s;
  return *this;
}

// --- Eigensolver -----------------------------------------------------------

EigenDecomp eig_sym(const SymMat& m) {
  if (!m.all_finite()) throw std::invalid_argument("eig_sym: non-finite entry");
  const std::size_t d = m.dim();
  Matrix a = m.to_dense();
  Matrix v = Matrix::identity(d);

  const double scale = m.frobenius_norm();
  bool converged = (scale == 0.0);
  for (int sweep = 0; !converged && sweep <= kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) < kJacobiRelTol * scale) {
      converged = true;
      break;
    }
    if (sweep == kMaxSweeps) break;

    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) {
    throw NumericalFailure("eig_sym: Jacobi iteration did not converge in " +
                           std::to_string(kMaxSweeps) + " sweeps");
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenDecomp out{Vector(d), Matrix(d, d)};
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a(src, src);
    double sign = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (std::abs(v(i, src)) > 1e-10) {
        sign = v(i, src) < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < d; ++i) out.vectors(i, k) = sign * v(i, src);
  }
  return out;
}

SymMat reconstruct(const EigenDecomp& e) {
  return spectral_map(e, [](double lambda) { return lambda; });
}

double spectral_norm(const SymMat& m) { return max_abs_eigenvalue(eig_sym(m)); }

double min_eigenvalue(const SymMat& m) {
  const EigenDecomp e = eig_sym(m);
  return e.values.empty() ? 0.0 : e.values.back();
}

double max_eigenvalue(const SymMat& m) {
  const EigenDecomp e = eig_sym(m);
  return e.values.empty() ? 0.0 : e.values.front();
}

double psd_tolerance(const SymMat& m) { return 1e-9 * std::max(1.0, spectral_norm(m)); }

double rank_tolerance(const SymMat& m) { return 1e-12 * std::max(1.0, spectral_norm(m)); }

bool is_psd(const SymMat& m) {
  const EigenDecomp e = eig_sym(m);
  if (e.values.empty()) return true;
  return e.values.back() >= -1e-9 * std::max(1.0, max_abs_eigenvalue(e));
}

bool loewner_leq(const SymMat& a, const SymMat& b, double tol) {
  require_same_dim(a, b, "loewner_leq");
  return min_eigenvalue(b - a) >= -tol;
}

SymMat inv_sqrt(const SymMat& m, double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("inv_sqrt: floor must be positive");
  const EigenDecomp e = eig_sym(m);
  if (!e.values.empty() && e.values.back() < floor) {
    throw NotPositiveDefinite("inv_sqrt: eigenvalue " + std::to_string(e.values.back()) +
                              " below floor " + std::to_string(floor));
  }
  return spectral_map(e, [](double lambda) { return 1.0 / std::sqrt(lambda); });
}

SymMat sqrt_psd(const SymMat& m) {
  const EigenDecomp e = eig_sym(m);
  if (e.values.empty()) return SymMat(0);
  const double tol = 1e-9 * std::max(1.0, max_abs_eigenvalue(e));
  if (e.values.back() < -tol) {
    throw NotPositiveDefinite("sqrt_psd: eigenvalue " + std::to_string(e.values.back()) +
                              " is negative");
  }
  return spectral_map(e, [](double lambda) { return std::sqrt(std::max(lambda, 0.0)); });
}

SymMat congruence(const SymMat& p, const SymMat& m) {
  require_same_dim(p, m, "congruence");
  return congruence(p.to_dense(), m);
}

SymMat congruence(const Matrix& a, const SymMat& m) {
  const std::size_t d = m.dim();
  if (a.rows() != d || a.cols() != d) throw DimensionMismatch("congruence: shape mismatch");
  // am = A M, then out = (A M) A^T restricted to the upper triangle.
  Matrix am(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) am(i, j) += aik * m(k, j);
    }
  SymMat out(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += am(i, k) * a(j, k);
      out.at(i, j) = s;
    }
  return out;
}

double spectral_dist_prepared(const SymMat& a, const SymMat& a_inv_sqrt, const SymMat& b,
                              const SymMat& b_inv_sqrt) {
  const double ab = distance_from_identity(congruence(a_inv_sqrt, b));
  const double ba = distance_from_identity(congruence(b_inv_sqrt, a));
  return std::max(ab, ba);
}

double spectral_dist(const SymMat& a, const SymMat& b) {
  require_same_dim(a, b, "spectral_dist");
  const EigenDecomp ea = eig_sym(a);
  const EigenDecomp eb = eig_sym(b);
  const double inf = std::numeric_limits<double>::infinity();
  if (ea.values.empty()) return 0.0;
  if (ea.values.back() <= 1e-12 * std::max(1.0, max_abs_eigenvalue(ea))) return inf;
  if (eb.values.back() <= 1e-12 * std::max(1.0, max_abs_eigenvalue(eb))) return inf;
  const auto inv_root = [](double lambda) { return 1.0 / std::sqrt(lambda); };
  return spectral_dist_prepared(a, spectral_map(ea, inv_root), b, spectral_map(eb, inv_root));
}

double rel_spectral_error(const SymMat& sigma, const SymMat& estimate) {
  require_same_dim(sigma, estimate, "rel_spectral_error");
  const SymMat w = inv_sqrt(sigma, std::max(rank_tolerance(sigma),
                                            std::numeric_limits<double>::min()));
  return distance_from_identity(congruence(w, estimate));
}

ShrinkMap shrink_map(std::span<const Vector> basis, double eta, std::size_t d) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("shrink_map: eta must lie in (0, 1)");
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].size() != d) throw DimensionMismatch("shrink_map: basis vector has wrong length");
    for (std::size_t j = i; j < basis.size(); ++j) {
      const double g = dot(basis[i], basis[j]);
      if (std::abs(g - (i == j ? 1.0 : 0.0)) > kGramTol) {
        throw std::invalid_argument("shrink_map: basis is not orthonormal");
      }
    }
  }
  // P_V = sum v v^T; forward = I - (1 - eta) P_V, inverse = I + (1/eta - 1) P_V.
  SymMat proj(d);
  for (const Vector& v : basis)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) proj.at(i, j) += v[i] * v[j];
  return ShrinkMap{SymMat::identity(d) - (1.0 - eta) * proj,
                   SymMat::identity(d) + (1.0 / eta - 1.0) * proj};
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

Vector multiply(const SymMat& m, std::span<const double> v) {
  if (v.size() != m.dim()) throw DimensionMismatch("multiply: length mismatch");
  Vector out(m.dim(), 0.0);
  for (std::size_t i = 0; i < m.dim(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.dim(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

double quadratic_form(const SymMat& m, std::span<const double> x) {
  return dot(x, multiply(m, x));
}

}  // namespace privmoment
