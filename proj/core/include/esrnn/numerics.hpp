#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace esrnn {

/// Dense real vector.
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  Vec(std::initializer_list<double> values) : data_(values) {}
  explicit Vec(std::vector<double> values) : data_(std::move(values)) {}

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  friend bool operator==(const Vec&, const Vec&) = default;

 private:
  std::vector<double> data_;
};

/// Dense real matrix, row-major.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  /// Builds from nested rows; all rows must have equal length.
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class Nonlinearity { sigmoid, tanh };

/// y = A x. Each row is accumulated left to right starting from +0.
Vec matvec(const Mat& a, std::span<const double> x);
inline Vec matvec(const Mat& a, const Vec& x) { return matvec(a, x.span()); }

/// y = A^T x, accumulated over rows of A in increasing order.
Vec matvec_transposed(const Mat& a, std::span<const double> x);

/// Maximum absolute row sum.
double inf_norm(const Mat& a);

/// Sum of absolute values of row i.
double row_l1(const Mat& a, std::size_t i);

/// Largest absolute value over all entries; 0 for an empty span.
double max_abs(std::span<const double> x);

double apply_nonlin(Nonlinearity kind, double x);
double nonlin_deriv(Nonlinearity kind, double x);
Vec apply_nonlin(Nonlinearity kind, const Vec& x);
/// Elementwise f'(x), i.e. the diagonal of D_f.
Vec nonlin_deriv(Nonlinearity kind, const Vec& x);

/// Supremum of |f'(x)|: 1/4 for sigmoid, 1 for tanh.
double gamma_of(Nonlinearity kind);

bool all_finite(std::span<const double> x);

}  // namespace esrnn
