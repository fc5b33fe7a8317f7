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

#ifndef SYNCNET_CONTROLLERS_H_
#define SYNCNET_CONTROLLERS_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "syncnet/linalg.h"
#include "syncnet/models.h"
#include "syncnet/topology.h"

namespace syncnet {

/// Upper shift matrix: ones on the first superdiagonal.
Mat BuildShiftMatrix(int n);

/// How Upsilon_r is chosen: pole placement at -lambda0 (multiplicity n) or
/// an explicit n x p matrix.
struct UpsilonProfile {
  double lambda0 = 2.0;
  std::optional<Mat> upsilon;
};

/// Constants of one error channel (the leader, or one follower edge).
struct ControllerConstants {
  Mat M;          // n x n
  Mat H;          // n x p
  Mat A_H;        // n x n, M + H Upsilon_r^T
  Mat P;          // n x n, A_H^T P + P A_H = -Q
  Mat Q;          // n x n
  Mat Z_r;        // n x p
  Mat Upsilon_r;  // n x p
  double b = 1.0;

  int n() const { return static_cast<int>(M.rows()); }
  int p() const { return static_cast<int>(H.cols()); }
};

/// b = mean of the last row of B_ctx, H = B_ctx Lambda_hat b, Z_r solved
/// from H Z_r^T = A_src - M, Upsilon_r from the profile, P from A_H and Q.
ControllerConstants DeriveConstants(const Mat& B_ctx, const Mat& lambda_hat,
                                    const Mat& A_src, const Mat& Q,
                                    const UpsilonProfile& profile = {});

struct DecompositionReport {
  double max_residual = 0.0;
  int trials = 0;
  bool degenerate = false;  // no samples were drawn
};

/// Samples state pairs in [-pi, pi]^n and checks
///   A_src (s(xa) - s(xb)) = M (xa - xb) + H Z_r^T (s(xa) - s(xb)).
/// Throws kDecompositionInvalid when a residual exceeds 1e-9.
DecompositionReport ValidateCanonicalDecomposition(const ControllerConstants& c,
                                                   const Mat& A_src,
                                                   const NonlinearMap& map,
                                                   int trials,
                                                   std::uint64_t seed);

/// Adaptation gain Gamma: either gamma * I of whatever size it meets, or a
/// fixed symmetric positive definite matrix.
class AdaptationRate {
 public:
  AdaptationRate() = default;
  explicit AdaptationRate(double gamma);
  explicit AdaptationRate(Mat gamma);

  bool is_scalar() const { return !matrix_.has_value(); }
  double scalar() const { return gamma_; }
  const std::optional<Mat>& matrix() const { return matrix_; }

  /// Throws kDimensionMismatch if a full matrix does not have size dim.
  void CheckDim(Eigen::Index dim, const char* what) const;

  template <typename Derived>
  Mat Apply(const Eigen::MatrixBase<Derived>& X) const {
    if (matrix_) return *matrix_ * X;
    return gamma_ * X;
  }
  template <typename Derived>
  Mat ApplyInverse(const Eigen::MatrixBase<Derived>& X) const {
    if (matrix_) return inverse_ * X;
    return X / gamma_;
  }

 private:
  double gamma_ = 1.0;
  std::optional<Mat> matrix_;
  Mat inverse_;
};

/// Gamma for each gain family.
struct AdaptationRates {
  AdaptationRate m{10.0};      // K_m (leader and followers)
  AdaptationRate r{10.0};      // K_r, K_rij
  AdaptationRate theta{5.0};   // own Theta
  AdaptationRate ij{10.0};     // K_ij
  AdaptationRate phi{5.0};     // neighbor Theta_j
  AdaptationRate p{1.0};       // K_p
};

// --- Shared kernels ---------------------------------------------------------

/// xi = u_nb - b Z_r^T (s_self - s_nb) + b Upsilon_r^T e.
template <typename DU, typename DA, typename DB, typename DE>
Vec AugmentedInput(const Eigen::MatrixBase<DU>& u_nb,
                   const Eigen::MatrixBase<DA>& sigma_self,
                   const Eigen::MatrixBase<DB>& sigma_nb,
                   const Eigen::MatrixBase<DE>& e, const ControllerConstants& c) {
  return u_nb - c.b * (c.Z_r.transpose() * (sigma_self - sigma_nb)) +
         c.b * (c.Upsilon_r.transpose() * e);
}

/// B^T P e, the transpose of the row e^T P B every law multiplies by.
template <typename DE>
Vec ProjectedError(const ControllerConstants& c, const Mat& B,
                   const Eigen::MatrixBase<DE>& e) {
  return B.transpose() * (c.P * e);
}

/// sign * Gamma * signal * projected^T.
template <typename DS, typename DP>
Mat AdaptiveLaw(const AdaptationRate& gamma, const Eigen::MatrixBase<DS>& signal,
                const Eigen::MatrixBase<DP>& projected, double sign) {
  return gamma.Apply(sign * (signal * projected.transpose()));
}

// --- Leader -----------------------------------------------------------------

struct LeaderState {
  Mat K_m;    // n x p
  Mat K_r;    // p x p
  Mat Theta;  // l x p
  Mat K_p;    // p x p, saturation only
  Vec e_p;    // n, saturation only
  bool saturation = false;

  static LeaderState Zero(int n, int p, int l, bool saturation);
};

/// Time derivative of every LeaderState entry.
struct LeaderRates {
  Mat K_m, K_r, Theta, K_p;
  Vec e_p;
};

Vec LeaderXi(const Vec& u_m, const Vec& sigma_1, const Vec& sigma_m,
             const Vec& e_1, const ControllerConstants& c);

/// u = K_m^T sigma + K_r^T xi - Theta^T phi.
Vec LeaderControl(const LeaderState& s, const Vec& sigma, const Vec& xi,
                  const Vec& phi);

/// K_m' = -G_m sigma e^T P B, K_r' = -G_r xi e^T P B and
/// Theta' = +G_theta phi e^T P B.
LeaderRates LeaderGainDerivatives(const LeaderState& s,
                                  const AdaptationRates& rates,
                                  const Vec& sigma, const Vec& xi,
                                  const Vec& phi, const Vec& e,
                                  const ControllerConstants& c, const Mat& B);

/// Saturation variant: laws driven by e_u = e - e_p, plus
/// K_p' = +G_p du e_u^T P B and e_p' = A_H e_p + B K_p^T du.
LeaderRates LeaderMsacGainDerivatives(const LeaderState& s,
                                      const AdaptationRates& rates,
                                      const Vec& sigma, const Vec& xi,
                                      const Vec& phi, const Vec& e,
                                      const Vec& delta_u,
                                      const ControllerConstants& c,
                                      const Mat& B);

// --- Followers --------------------------------------------------------------

struct FollowerEdgeState {
  AgentId neighbor = 0;
  Mat K;      // n x p
  Mat K_r;    // p x p
  Mat Theta;  // l_j x p
  Vec e_p;    // n, saturation only
};

struct FollowerState {
  std::vector<FollowerEdgeState> edges;
  Mat K_m;    // n x p
  Mat Theta;  // l_i x p
  Mat K_p;    // p x p, saturation only
  bool saturation = false;
};

struct FollowerEdgeRates {
  Mat K, K_r, Theta;
  Vec e_p;
};

struct FollowerRates {
  std::vector<FollowerEdgeRates> edges;
  Mat K_m, Theta, K_p;
};

/// What agent i knows about one in-neighbor j.
struct NeighborSignals {
  Vec sigma;  // sigma_j (x_j in linear mode)
  Vec xi;     // xi_ij
  Vec phi;    // phi_j
  Vec error;  // e_ij = x_i - x_j (gain derivatives only)
  const ControllerConstants* constants = nullptr;
};

Vec FollowerXi(const Vec& u_j, const Vec& sigma_i, const Vec& sigma_j,
               const Vec& e_ij, const ControllerConstants& c_j);

/// u = sum_j (K_ij^T s_j + K_rij^T xi_ij + Theta_j^T phi_j)
///     + K_m^T Xi - Theta_i^T phi_i; linear mode drops both Theta terms.
Vec FollowerControl(const FollowerState& s,
                    const std::vector<NeighborSignals>& neighbors,
                    const Vec& sigma_i, const Vec& Xi, const Vec& phi_i,
                    bool linear_mode);

/// Per-edge laws use that edge's error; K_m and Theta_i sum over edges.
/// Theta_i' carries a plus sign so the cross term cancels in V'.
FollowerRates FollowerGainDerivatives(
    const FollowerState& s, const AdaptationRates& rates,
    const std::vector<NeighborSignals>& neighbors, const Vec& Xi,
    const Vec& phi_i, const Mat& B_i, bool linear_mode);

/// Saturation variant; each neighbor's `error` is e_ij and the edge's e_p is
/// taken from the state. Throws kSaturationModeDisabled when the state was
/// built without saturation.
FollowerRates MsacGainDerivatives(const FollowerState& s,
                                  const AdaptationRates& rates,
                                  const std::vector<NeighborSignals>& neighbors,
                                  const Vec& Xi, const Vec& phi_i,
                                  const Vec& delta_u, const Mat& B_i,
                                  bool linear_mode);

// --- Saturation -------------------------------------------------------------

struct SaturationSpec {
  Vec u_max;  // per-channel bound, > 0 (may be +inf)
  void Validate(int p) const;
};

struct SaturationResult {
  Vec u_sat;
  Vec delta;  // u - u_sat
};

SaturationResult Saturate(const Vec& u, const SaturationSpec& spec);

/// e_p' = A_H e_p + B K_p^T du.
Vec PerformanceErrorDerivative(const Vec& e_p, const Vec& delta_u,
                               const Mat& K_p, const ControllerConstants& c,
                               const Mat& B);

}  // namespace syncnet

#endif  // SYNCNET_CONTROLLERS_H_
