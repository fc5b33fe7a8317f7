/*
 * Copyright 2026 The syncnet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


// Reference computations the library results are checked against. Nothing
// here calls into the library's solvers.

#ifndef SYNCNET_TESTS_ORACLES_H_
#define SYNCNET_TESTS_ORACLES_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Dense Gaussian elimination with partial pivoting on plain arrays.
inline std::vector<double> GaussSolve(std::vector<std::vector<double>> a,
                                      std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    if (a[piv][col] == 0.0) throw std::runtime_error("singular");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

// P with P A + A^T P = -Q from the vec identity
//   vec(P A) = (A^T kron I) vec P,  vec(A^T P) = (I kron A^T) vec P,
// with column-major vec. The Kronecker products are written out entry by entry.
inline Mat KroneckerLyapunov(const Mat& A, const Mat& Q) {
  const int n = static_cast<int>(A.rows());
  const int N = n * n;
  std::vector<std::vector<double>> K(N, std::vector<double>(N, 0.0));
  for (int r1 = 0; r1 < n; ++r1) {
    for (int c1 = 0; c1 < n; ++c1) {
      for (int r2 = 0; r2 < n; ++r2) {
        for (int c2 = 0; c2 < n; ++c2) {
          const int row = r1 * n + r2;
          const int col = c1 * n + c2;
          // (A^T kron I)(row, col) = A^T(r1, c1) * I(r2, c2)
          if (r2 == c2) K[row][col] += A(c1, r1);
          // (I kron A^T)(row, col) = I(r1, c1) * A^T(r2, c2)
          if (r1 == c1) K[row][col] += A(c2, r2);
        }
      }
    }
  }
  std::vector<double> rhs(N);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) rhs[c * n + r] = -Q(r, c);
  }
  const std::vector<double> p = GaussSolve(K, rhs);
  Mat P(n, n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) P(r, c) = p[c * n + r];
  }
  return P;
}

// Sylvester's criterion through leading principal minors (n <= 4 is cheap).
inline bool LeadingMinorsPositive(const Mat& P) {
  for (int k = 1; k <= P.rows(); ++k) {
    std::vector<std::vector<double>> a(k, std::vector<double>(k));
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) a[i][j] = P(i, j);
    }
    double det = 1.0;
    for (int col = 0; col < k; ++col) {
      int piv = col;
      for (int r = col + 1; r < k; ++r) {
        if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
      }
      if (a[piv][col] == 0.0) return false;
      if (piv != col) {
        std::swap(a[piv], a[col]);
        det = -det;
      }
      det *= a[col][col];
      for (int r = col + 1; r < k; ++r) {
        const double f = a[r][col] / a[col][col];
        for (int c = col; c < k; ++c) a[r][c] -= f * a[col][c];
      }
    }
    if (!(det > 0.0)) return false;
  }
  return true;
}

// Generators. A Hurwitz matrix is built as T (S - D) T^-1 with S skew and D
// symmetric positive definite: the symmetric part of S - D is negative
// definite, so every eigenvalue has negative real part, and the similarity
// keeps the spectrum while breaking the structure.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int Int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  Mat Matrix(int r, int c, double lo = -1.0, double hi = 1.0) {
    Mat m(r, c);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) m(i, j) = Uniform(lo, hi);
    }
    return m;
  }
  Vec Vector(int n, double lo = -1.0, double hi = 1.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = Uniform(lo, hi);
    return v;
  }
  Mat Spd(int n, double floor = 0.5) {
    const Mat L = Matrix(n, n);
    return L * L.transpose() + floor * Mat::Identity(n, n);
  }
  Mat Hurwitz(int n) {
    const Mat R = Matrix(n, n);
    const Mat S = R - R.transpose();
    const Mat D = Spd(n, 0.3);
    Mat T = Mat::Identity(n, n) + 0.4 * Matrix(n, n);
    while (std::fabs(T.determinant()) < 0.2) T = Mat::Identity(n, n) + 0.4 * Matrix(n, n);
    return T * (S - D) * T.inverse();
  }

 private:
  std::mt19937_64 rng_;
};

// x(t + h) for x' = -x after one classical RK4 step, written out by hand.
inline double Rk4DecayStep(double x, double h) {
  const double k1 = -x;
  const double k2 = -(x + 0.5 * h * k1);
  const double k3 = -(x + 0.5 * h * k2);
  const double k4 = -(x + h * k3);
  return x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
}

}  // namespace oracle

#endif  // SYNCNET_TESTS_ORACLES_H_
