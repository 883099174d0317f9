#pragma once

#include <cstddef>
#include <vector>

namespace cnids {

/// Dense square matrix of doubles, row-major. Sized for the small module
/// networks this library simulates (a few hundred nodes at most), so no
/// sparse storage and no bounds checking in the accessors.
class SquareMatrix {
public:
  SquareMatrix() = default;
  explicit SquareMatrix(int n, double fill = 0.0)
      : n_(n), data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill) {}

  static SquareMatrix identity(int n) {
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int size() const { return n_; }

  double operator()(int i, int j) const { return data_[idx(i, j)]; }
  double& operator()(int i, int j) { return data_[idx(i, j)]; }

  /// max |m(i,j) - m(j,i)| over all pairs.
  double max_abs_asymmetry() const;

  double row_sum(int i) const;

  bool operator==(const SquareMatrix&) const = default;

private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }

  int n_ = 0;
  std::vector<double> data_;
};

inline double SquareMatrix::max_abs_asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      const double d = (*this)(i, j) - (*this)(j, i);
      const double a = d < 0 ? -d : d;
      if (a > worst) worst = a;
    }
  }
  return worst;
}

inline double SquareMatrix::row_sum(int i) const {
  double s = 0.0;
  for (int j = 0; j < n_; ++j) s += (*this)(i, j);
  return s;
}

}  // namespace cnids
