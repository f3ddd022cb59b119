#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <vector>

#include "amw/error.hpp"

namespace amw {

/// Dense square matrix, row-major.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n, T fill = T{}) : n_(n), data_(static_cast<std::size_t>(n) * n, fill) {}

  Matrix(std::initializer_list<std::initializer_list<T>> rows) : n_(static_cast<int>(rows.size())) {
    data_.reserve(static_cast<std::size_t>(n_) * n_);
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != n_) {
        throw Error(ErrorCode::DimensionMismatch, "matrix literal is not square");
      }
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(int n) {
    Matrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(int i, int j) noexcept { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  const T& operator()(int i, int j) const noexcept {
    return data_[static_cast<std::size_t>(i) * n_ + j];
  }

  std::span<T> row(int i) noexcept { return {data_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)}; }
  std::span<const T> row(int i) const noexcept {
    return {data_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)};
  }

  std::span<T> flat() noexcept { return data_; }
  std::span<const T> flat() const noexcept { return data_; }

  T row_sum(int i) const {
    auto r = row(i);
    return std::accumulate(r.begin(), r.end(), T{});
  }
  T col_sum(int j) const {
    T s{};
    for (int i = 0; i < n_; ++i) s += (*this)(i, j);
    return s;
  }
  T total() const { return std::accumulate(data_.begin(), data_.end(), T{}); }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  template <typename U>
  Matrix<U> cast() const {
    Matrix<U> out(n_);
    std::transform(data_.begin(), data_.end(), out.flat().begin(),
                   [](const T& v) { return static_cast<U>(v); });
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  int n_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<std::int64_t>;
using RealMatrix = Matrix<double>;

template <typename T>
double frobenius_norm(const Matrix<T>& m) {
  double s = 0.0;
  for (const T& v : m.flat()) s += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(s);
}

template <typename T>
double inner(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.n() != b.n()) throw Error(ErrorCode::DimensionMismatch, "inner product of unequal sizes");
  double s = 0.0;
  auto fa = a.flat();
  auto fb = b.flat();
  for (std::size_t k = 0; k < fa.size(); ++k) s += static_cast<double>(fa[k]) * static_cast<double>(fb[k]);
  return s;
}

}  // namespace amw
