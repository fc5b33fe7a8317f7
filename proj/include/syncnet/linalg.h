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

#ifndef SYNCNET_LINALG_H_
#define SYNCNET_LINALG_H_

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "syncnet/error.h"

namespace syncnet {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mat = MatrixX<double>;
using Vec = VectorX<double>;

// All numerical acceptance thresholds used by the setup checks live here.
namespace tolerance {
inline constexpr double kLyapunovResidual = 1e-10;  // relative to 1 + |Q|_F
inline constexpr double kSymmetry = 1e-9;           // relative to |P|_F
inline constexpr double kPivot = 1e-12;             // relative to max |P_kk|
inline constexpr double kMatchingResidual = 1e-8;   // relative, Frobenius
inline constexpr double kDecomposition = 1e-9;      // absolute, 2-norm
}  // namespace tolerance

/// Kronecker lift of the continuous Lyapunov operator P -> P*A + A^T*P,
/// acting on the column-major vectorization of P:
///   (I (x) A^T + A^T (x) I) vec(P).
template <typename Derived>
MatrixX<typename Derived::Scalar> LyapunovOperator(
    const Eigen::MatrixBase<Derived>& A) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = A.rows();
  MatrixX<Scalar> op = MatrixX<Scalar>::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    op.block(i * n, i * n, n, n) += A.transpose();
    for (Eigen::Index j = 0; j < n; ++j) {
      op.block(i * n, j * n, n, n).diagonal().array() += A(j, i);
    }
  }
  return op;
}

/// True iff P is symmetric (relative Frobenius tolerance) and every pivot of
/// its Cholesky factorization exceeds the pivot threshold.
template <typename Derived>
bool PdCheck(const Eigen::MatrixBase<Derived>& P) {
  using Scalar = typename Derived::Scalar;
  if (P.rows() != P.cols() || P.size() == 0 || !P.allFinite()) return false;
  const Scalar norm = P.norm();
  if (norm == Scalar(0)) return false;
  if ((P - P.transpose()).norm() > Scalar(tolerance::kSymmetry) * norm) {
    return false;
  }
  const Eigen::Index n = P.rows();
  MatrixX<Scalar> L = (P + P.transpose()) / Scalar(2);
  const Scalar scale = L.diagonal().cwiseAbs().maxCoeff();
  const Scalar threshold = Scalar(tolerance::kPivot) * scale;
  for (Eigen::Index k = 0; k < n; ++k) {
    Scalar pivot = L(k, k);
    for (Eigen::Index m = 0; m < k; ++m) pivot -= L(k, m) * L(k, m);
    if (!(pivot > threshold)) return false;
    L(k, k) = std::sqrt(pivot);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      Scalar s = L(i, k);
      for (Eigen::Index m = 0; m < k; ++m) s -= L(i, m) * L(k, m);
      L(i, k) = s / L(k, k);
    }
  }
  return true;
}

/// Solves P*A + A^T*P = -Q for symmetric P.
///
/// The equation is vectorized and the n^2 x n^2 system is solved by LU with
/// partial pivoting; sizes in this library never exceed n = 10. Throws
/// kSingularSystem when the lifted operator is numerically singular (A has
/// eigenvalues summing to zero) and kNotHurwitz when the solution is not
/// positive definite.
template <typename DerivedA, typename DerivedQ>
MatrixX<typename DerivedA::Scalar> SolveLyapunov(
    const Eigen::MatrixBase<DerivedA>& A,
    const Eigen::MatrixBase<DerivedQ>& Q) {
  using Scalar = typename DerivedA::Scalar;
  if (A.rows() != A.cols() || Q.rows() != Q.cols() || A.rows() != Q.rows() ||
      A.rows() == 0) {
    throw Error(ErrorCode::kDimensionMismatch,
                "SolveLyapunov: A and Q must be square and of equal size");
  }
  if (!A.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "SolveLyapunov: A not finite");
  }
  if (!PdCheck(Q)) {
    throw Error(ErrorCode::kInvalidArgument,
                "SolveLyapunov: Q must be symmetric positive definite");
  }
  const Eigen::Index n = A.rows();
  const MatrixX<Scalar> op = LyapunovOperator(A);
  Eigen::PartialPivLU<MatrixX<Scalar>> lu(op);
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const Scalar largest = pivots.maxCoeff();
  const Scalar smallest = pivots.minCoeff();
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  if (!(largest > Scalar(0)) ||
      smallest <= Scalar(n * n) * eps * largest) {
    throw Error(ErrorCode::kSingularSystem,
                "SolveLyapunov: Kronecker system is singular");
  }
  const MatrixX<Scalar> q = Q;
  VectorX<Scalar> rhs =
      -Eigen::Map<const VectorX<Scalar>>(q.data(), n * n);
  VectorX<Scalar> p = lu.solve(rhs);
  MatrixX<Scalar> P = Eigen::Map<MatrixX<Scalar>>(p.data(), n, n);
  P = ((P + P.transpose()) / Scalar(2)).eval();

  const Scalar residual = (P * A + A.transpose() * P + Q).norm();
  if (!(residual <= Scalar(tolerance::kLyapunovResidual) * (Scalar(1) + Q.norm()))) {
    throw Error(ErrorCode::kSingularSystem,
                "SolveLyapunov: residual " + std::to_string(double(residual)) +
                    " exceeds tolerance (ill-conditioned system)");
  }
  if (!PdCheck(P)) {
    throw Error(ErrorCode::kNotHurwitz,
                "SolveLyapunov: solution is not positive definite");
  }
  return P;
}

/// Lyapunov criterion: A is Hurwitz iff A^T P + P A = -I has a positive
/// definite solution.
template <typename Derived>
bool IsHurwitz(const Eigen::MatrixBase<Derived>& A) {
  using Scalar = typename Derived::Scalar;
  if (A.rows() != A.cols() || A.size() == 0 || !A.allFinite()) return false;
  try {
    SolveLyapunov(A, MatrixX<Scalar>::Identity(A.rows(), A.cols()));
  } catch (const Error&) {
    return false;
  }
  return true;
}

/// |X - Y|_F / max(1, |Y|_F).
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar RelativeResidual(const Eigen::MatrixBase<DerivedX>& X,
                                           const Eigen::MatrixBase<DerivedY>& Y) {
  using Scalar = typename DerivedX::Scalar;
  return (X - Y).norm() / std::max(Scalar(1), Y.norm());
}

}  // namespace syncnet

#endif  // SYNCNET_LINALG_H_
