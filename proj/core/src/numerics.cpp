#include "esrnn/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "esrnn/error.hpp"

namespace esrnn {

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw UsageError("Mat: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec matvec(const Mat& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    throw UsageError("matvec: matrix has " + std::to_string(a.cols()) + " columns, vector has " +
                     std::to_string(x.size()) + " entries");
  }
  Vec y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
  return y;
}

Vec matvec_transposed(const Mat& a, std::span<const double> x) {
  if (a.rows() != x.size()) {
    throw UsageError("matvec_transposed: matrix has " + std::to_string(a.rows()) +
                     " rows, vector has " + std::to_string(x.size()) + " entries");
  }
  Vec y(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    const double xi = x[i];
    for (std::size_t j = 0; j < r.size(); ++j) y[j] += r[j] * xi;
  }
  return y;
}

double row_l1(const Mat& a, std::size_t i) {
  if (i >= a.rows()) {
    throw UsageError("row_l1: row " + std::to_string(i) + " out of range for " +
                     std::to_string(a.rows()) + " rows");
  }
  double acc = 0.0;
  for (double v : a.row(i)) acc += std::abs(v);
  return acc;
}

double inf_norm(const Mat& a) {
  if (a.rows() == 0 || a.cols() == 0) throw UsageError("inf_norm: empty matrix");
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) best = std::max(best, row_l1(a, i));
  return best;
}

double max_abs(std::span<const double> x) {
  double best = 0.0;
  for (double v : x) best = std::max(best, std::abs(v));
  return best;
}

double apply_nonlin(Nonlinearity kind, double x) {
  switch (kind) {
    case Nonlinearity::sigmoid:
      // Split on sign so exp never overflows.
      if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
      {
        const double e = std::exp(x);
        return e / (1.0 + e);
      }
    case Nonlinearity::tanh:
      return std::tanh(x);
  }
  return 0.0;
}

double nonlin_deriv(Nonlinearity kind, double x) {
  switch (kind) {
    case Nonlinearity::sigmoid: {
      const double s = apply_nonlin(kind, x);
      return s * (1.0 - s);
    }
    case Nonlinearity::tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
  }
  return 0.0;
}

Vec apply_nonlin(Nonlinearity kind, const Vec& x) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = apply_nonlin(kind, x[i]);
  return y;
}

Vec nonlin_deriv(Nonlinearity kind, const Vec& x) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = nonlin_deriv(kind, x[i]);
  return y;
}

double gamma_of(Nonlinearity kind) {
  return kind == Nonlinearity::sigmoid ? 0.25 : 1.0;
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace esrnn
