#pragma once

// Exact linear algebra over Q(i): sparse coordinate vectors, small dense
// matrices, and subspaces kept as orthogonal bases.

#include "hyperrigid/exact.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <vector>

namespace hyperrigid {

/// Coordinates in an orthonormal basis; absent entries are zero.
using SparseVec = std::map<std::size_t, Gaussian>;

inline void axpy(SparseVec& y, const Gaussian& a, const SparseVec& x) {
  if (a.is_zero()) return;
  for (const auto& [i, v] : x) {
    auto& slot = y[i];
    slot += a * v;
    if (slot.is_zero()) y.erase(i);
  }
}

inline void prune(SparseVec& x) {
  std::erase_if(x, [](const auto& kv) { return kv.second.is_zero(); });
}

inline SparseVec operator-(SparseVec a, const SparseVec& b) {
  prune(a);
  axpy(a, Gaussian(-1), b);
  return a;
}

inline SparseVec unit_vector(std::size_t i) { return SparseVec{{i, Gaussian(1)}}; }

// Conjugate-linear in the first argument.
inline Gaussian inner(const SparseVec& x, const SparseVec& y) {
  Gaussian acc;
  auto it = x.begin();
  auto jt = y.begin();
  while (it != x.end() && jt != y.end()) {
    if (it->first < jt->first) {
      ++it;
    } else if (jt->first < it->first) {
      ++jt;
    } else {
      acc += it->second.conj() * jt->second;
      ++it;
      ++jt;
    }
  }
  return acc;
}

inline Rational norm2(const SparseVec& x) {
  Rational acc;
  for (const auto& [i, v] : x) acc += v.norm2();
  return acc;
}

inline Rational max_abs(const SparseVec& x) {
  Rational m;
  for (const auto& [i, v] : x) {
    Rational a = v.max_abs();
    if (m < a) m = a;
  }
  return m;
}

/// Small dense matrix; used for evaluations and Gram blocks.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Gaussian(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Gaussian& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Gaussian& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix adjoint() const {
    Matrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j).conj();
    return m;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DomainError("matrix shape mismatch");
    Matrix m(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) m(i, j) += a(i, k) * b(k, j);
      }
    return m;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Gaussian> data_;
};

/// Subspace of C^n held as an orthogonal basis (Gram-Schmidt over Q(i), so
/// projections stay exact without square roots).
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(std::size_t ambient_dim) : ambient_dim_(ambient_dim) {}

  static Subspace span(std::size_t ambient_dim, const std::vector<SparseVec>& vectors) {
    Subspace s(ambient_dim);
    for (const auto& v : vectors) s.insert(v);
    return s;
  }
  static Subspace whole(std::size_t ambient_dim) {
    Subspace s(ambient_dim);
    for (std::size_t i = 0; i < ambient_dim; ++i) s.add(unit_vector(i));
    return s;
  }

  std::size_t ambient_dim() const { return ambient_dim_; }
  std::size_t dim() const { return basis_.size(); }
  bool empty() const { return basis_.empty(); }
  const std::vector<SparseVec>& basis() const { return basis_; }

  // Only basis vectors sharing a coordinate with v can pair with it.
  SparseVec project(const SparseVec& v) const {
    std::vector<std::size_t> touched;
    for (const auto& [i, a] : v) {
      auto it = support_.find(i);
      if (it != support_.end()) touched.insert(touched.end(), it->second.begin(), it->second.end());
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    SparseVec p;
    for (std::size_t k : touched) axpy(p, inner(basis_[k], v) / Gaussian(norms_[k]), basis_[k]);
    return p;
  }
  SparseVec residual(const SparseVec& v) const { return v - project(v); }
  bool contains(const SparseVec& v) const { return residual(v).empty(); }

  // Returns true when v enlarged the span.
  bool insert(const SparseVec& v) {
    SparseVec r = residual(v);
    if (r.empty()) return false;
    add(std::move(r));
    return true;
  }

  bool contains(const Subspace& other) const {
    for (const auto& v : other.basis_)
      if (!contains(v)) return false;
    return true;
  }

  /// Vectors of `outer` orthogonal to this subspace.
  Subspace complement_within(const Subspace& outer) const {
    Subspace out(ambient_dim_);
    for (const auto& v : outer.basis_) {
      SparseVec r = residual(v);
      if (!r.empty()) out.insert(r);
    }
    return out;
  }
  Subspace orthogonal_complement() const {
    Subspace out(ambient_dim_);
    for (std::size_t i = 0; i < ambient_dim_ && dim() + out.dim() < ambient_dim_; ++i) {
      SparseVec r = residual(unit_vector(i));
      if (!r.empty()) out.insert(r);
    }
    return out;
  }

  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.ambient_dim_ == b.ambient_dim_ && a.dim() == b.dim() && a.contains(b);
  }

 private:
  void add(SparseVec r) {
    for (const auto& [i, a] : r) support_[i].push_back(basis_.size());
    norms_.push_back(norm2(r));
    basis_.push_back(std::move(r));
  }

  std::size_t ambient_dim_ = 0;
  std::vector<SparseVec> basis_;
  std::vector<Rational> norms_;
  std::map<std::size_t, std::vector<std::size_t>> support_;  // coordinate -> basis vectors using it
};

}  // namespace hyperrigid
