#pragma once

#include <cmath>
#include <vector>

#include "hommb/errors.hpp"

namespace hommb::detail {

/// Row-major dense matrix just big enough for the small systems this project
/// solves (interpolation weights, least-squares stencils). Not a linear
/// algebra library; only what the call sites need.
struct DenseMat {
  int m_rows = 0, m_cols = 0;
  std::vector<double> m_a;

  DenseMat() = default;
  DenseMat(int r, int c) : m_rows(r), m_cols(c), m_a(static_cast<size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return m_a[static_cast<size_t>(i) * m_cols + j]; }
  double operator()(int i, int j) const { return m_a[static_cast<size_t>(i) * m_cols + j]; }
};

/// Solve the square system A x = b by Gaussian elimination with partial
/// pivoting. A and b are overwritten. Throws on numerically singular A.
inline std::vector<double> solve_square(DenseMat A, std::vector<double> b) {
  const int n = A.m_rows;
  HOMMB_REQUIRE(A.m_cols == n && static_cast<int>(b.size()) == n, "square solve shape");
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
    if (std::abs(A(piv, k)) < 1e-300)
      throw NumericalContractError("singular matrix in small dense solve");
    if (piv != k) {
      for (int j = k; j < n; ++j) std::swap(A(k, j), A(piv, j));
      std::swap(b[static_cast<size_t>(k)], b[static_cast<size_t>(piv)]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = A(i, k) / A(k, k);
      A(i, k) = 0.0;
      for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
      b[static_cast<size_t>(i)] -= f * b[static_cast<size_t>(k)];
    }
  }
  std::vector<double> x(static_cast<size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    double s = b[static_cast<size_t>(i)];
    for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[static_cast<size_t>(j)];
    x[static_cast<size_t>(i)] = s / A(i, i);
  }
  return x;
}

/// Thin Householder QR of an m x n matrix (m >= n), factors stored in place.
/// Supports applying Q^T to vectors and solving R y = z, which is all the
/// least-squares stencil construction needs.
struct HouseholderQR {
  DenseMat m_qr;          // upper triangle holds R, lower part the reflectors
  std::vector<double> m_beta;

  explicit HouseholderQR(DenseMat A) : m_qr(std::move(A)) {
    const int m = m_qr.m_rows, n = m_qr.m_cols;
    HOMMB_REQUIRE(m >= n, "QR expects a tall matrix");
    m_beta.assign(static_cast<size_t>(n), 0.0);
    for (int k = 0; k < n; ++k) {
      double norm = 0.0;
      for (int i = k; i < m; ++i) norm = std::hypot(norm, m_qr(i, k));
      if (norm < 1e-300)
        throw NumericalContractError("rank-deficient least-squares system");
      double alpha = (m_qr(k, k) >= 0.0) ? -norm : norm;
      const double vk = m_qr(k, k) - alpha;
      m_qr(k, k) = alpha;
      // store v (scaled so v[k] = 1) below the diagonal
      for (int i = k + 1; i < m; ++i) m_qr(i, k) /= vk;
      m_beta[static_cast<size_t>(k)] = -vk / alpha;
      // apply reflector to remaining columns
      for (int j = k + 1; j < n; ++j) {
        double s = m_qr(k, j);
        for (int i = k + 1; i < m; ++i) s += m_qr(i, k) * m_qr(i, j);
        s *= m_beta[static_cast<size_t>(k)];
        m_qr(k, j) -= s;
        for (int i = k + 1; i < m; ++i) m_qr(i, j) -= s * m_qr(i, k);
      }
    }
  }

  int rows() const { return m_qr.m_rows; }
  int cols() const { return m_qr.m_cols; }

  /// v <- Q^T v (length m).
  void apply_qt(std::vector<double>& v) const {
    const int m = m_qr.m_rows, n = m_qr.m_cols;
    for (int k = 0; k < n; ++k) {
      double s = v[static_cast<size_t>(k)];
      for (int i = k + 1; i < m; ++i) s += m_qr(i, k) * v[static_cast<size_t>(i)];
      s *= m_beta[static_cast<size_t>(k)];
      v[static_cast<size_t>(k)] -= s;
      for (int i = k + 1; i < m; ++i) v[static_cast<size_t>(i)] -= s * m_qr(i, k);
    }
  }

  /// v <- Q v (length m).
  void apply_q(std::vector<double>& v) const {
    const int m = m_qr.m_rows, n = m_qr.m_cols;
    for (int k = n - 1; k >= 0; --k) {
      double s = v[static_cast<size_t>(k)];
      for (int i = k + 1; i < m; ++i) s += m_qr(i, k) * v[static_cast<size_t>(i)];
      s *= m_beta[static_cast<size_t>(k)];
      v[static_cast<size_t>(k)] -= s;
      for (int i = k + 1; i < m; ++i) v[static_cast<size_t>(i)] -= s * m_qr(i, k);
    }
  }

  /// Solve R y = z for the leading n entries of z.
  std::vector<double> solve_r(const std::vector<double>& z) const {
    const int n = m_qr.m_cols;
    std::vector<double> y(static_cast<size_t>(n));
    for (int i = n - 1; i >= 0; --i) {
      double s = z[static_cast<size_t>(i)];
      for (int j = i + 1; j < n; ++j) s -= m_qr(i, j) * y[static_cast<size_t>(j)];
      y[static_cast<size_t>(i)] = s / m_qr(i, i);
    }
    return y;
  }

  /// Solve R^T w = t (forward substitution on the transpose).
  std::vector<double> solve_rt(const std::vector<double>& t) const {
    const int n = m_qr.m_cols;
    std::vector<double> w(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      double s = t[static_cast<size_t>(i)];
      for (int j = 0; j < i; ++j) s -= m_qr(j, i) * w[static_cast<size_t>(j)];
      w[static_cast<size_t>(i)] = s / m_qr(i, i);
    }
    return w;
  }
};

} // namespace hommb::detail
