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

#include "syncnet/controllers.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace syncnet {
namespace {

double Binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void CheckLength(const Vec& v, Eigen::Index want, const char* what) {
  if (v.size() != want) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + " has wrong length");
  }
}

// Shared body of the follower laws. delta_u == nullptr selects the plain
// (unsaturated) laws driven by e_ij.
FollowerRates FollowerLaws(const FollowerState& s, const AdaptationRates& rates,
                           const std::vector<NeighborSignals>& neighbors,
                           const Vec& Xi, const Vec& phi_i, const Vec* delta_u,
                           const Mat& B_i, bool linear_mode) {
  if (neighbors.empty()) {
    throw Error(ErrorCode::kEmptyNeighborList, "follower has no in-neighbors");
  }
  if (neighbors.size() != s.edges.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "neighbor data does not match the follower's edges");
  }
  const Eigen::Index p = B_i.cols();
  FollowerRates out;
  out.edges.resize(neighbors.size());
  Vec sum_proj = Vec::Zero(p);
  for (std::size_t k = 0; k < neighbors.size(); ++k) {
    const NeighborSignals& nb = neighbors[k];
    const FollowerEdgeState& edge = s.edges[k];
    if (nb.constants == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "neighbor constants missing");
    }
    const ControllerConstants& c = *nb.constants;
    const Vec err = delta_u ? Vec(nb.error - edge.e_p) : nb.error;
    const Vec proj = ProjectedError(c, B_i, err);
    sum_proj += proj;
    FollowerEdgeRates& r = out.edges[k];
    r.K = AdaptiveLaw(rates.ij, nb.sigma, proj, -1.0);
    r.K_r = AdaptiveLaw(rates.r, nb.xi, proj, -1.0);
    r.Theta = linear_mode ? Mat(Mat::Zero(edge.Theta.rows(), p))
                          : AdaptiveLaw(rates.phi, nb.phi, proj, -1.0);
    r.e_p = delta_u ? PerformanceErrorDerivative(edge.e_p, *delta_u, s.K_p, c, B_i)
                    : Vec(Vec::Zero(edge.e_p.size()));
  }
  out.K_m = AdaptiveLaw(rates.m, Xi, sum_proj, -1.0);
  out.Theta = linear_mode ? Mat(Mat::Zero(s.Theta.rows(), p))
                          : AdaptiveLaw(rates.theta, phi_i, sum_proj, 1.0);
  out.K_p = delta_u ? AdaptiveLaw(rates.p, *delta_u, sum_proj, 1.0)
                    : Mat(Mat::Zero(s.K_p.rows(), s.K_p.cols()));
  return out;
}

}  // namespace

Mat BuildShiftMatrix(int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "build_M needs n >= 1");
  Mat M = Mat::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) M(k, k + 1) = 1.0;
  return M;
}

ControllerConstants DeriveConstants(const Mat& B_ctx, const Mat& lambda_hat,
                                    const Mat& A_src, const Mat& Q,
                                    const UpsilonProfile& profile) {
  const Eigen::Index n = A_src.rows(), p = B_ctx.cols();
  if (A_src.cols() != n || B_ctx.rows() != n || lambda_hat.rows() != p ||
      lambda_hat.cols() != p || Q.rows() != n || Q.cols() != n || n == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "derive_constants: shapes disagree");
  }
  if (!IsCompanionInput(B_ctx)) {
    throw Error(ErrorCode::kNotCompanionForm,
                "input matrix has nonzero entries outside its last p rows");
  }
  ControllerConstants c;
  c.Q = Q;
  c.M = BuildShiftMatrix(static_cast<int>(n));
  c.b = B_ctx.row(n - 1).mean();
  if (c.b == 0.0) {
    throw Error(ErrorCode::kNotCompanionForm, "last row of B averages to zero");
  }
  c.H = B_ctx * lambda_hat * c.b;
  try {
    c.Z_r = SolveInputMatching(c.H, A_src - c.M, "Z_r").transpose();
  } catch (const Error& e) {
    throw Error(ErrorCode::kNotCompanionForm,
                "unactuated rows of A do not follow the shift structure (" +
                    e.detail() + ")");
  }
  if (profile.upsilon) {
    if (profile.upsilon->rows() != n || profile.upsilon->cols() != p) {
      throw Error(ErrorCode::kDimensionMismatch, "Upsilon_r must be n x p");
    }
    c.Upsilon_r = *profile.upsilon;
  } else {
    if (!(profile.lambda0 > 0.0) || !std::isfinite(profile.lambda0)) {
      throw Error(ErrorCode::kNonPositiveParameter, "lambda0 must be positive");
    }
    // Companion matrix of (s + lambda0)^n; only its last row differs from M.
    Mat target = c.M;
    for (Eigen::Index k = 0; k < n; ++k) {
      target(n - 1, k) = -Binomial(static_cast<int>(n), static_cast<int>(k)) *
                         std::pow(profile.lambda0, static_cast<double>(n - k));
    }
    c.Upsilon_r = SolveInputMatching(c.H, target - c.M, "Upsilon_r").transpose();
  }
  c.A_H = c.M + c.H * c.Upsilon_r.transpose();
  if (!IsHurwitz(c.A_H)) {
    throw Error(ErrorCode::kNotHurwitz, "A_H = M + H Upsilon_r^T is not Hurwitz");
  }
  c.P = SolveLyapunov(c.A_H, Q);
  return c;
}

DecompositionReport ValidateCanonicalDecomposition(const ControllerConstants& c,
                                                   const Mat& A_src,
                                                   const NonlinearMap& map,
                                                   int trials,
                                                   std::uint64_t seed) {
  if (trials < 0) {
    throw Error(ErrorCode::kInvalidArgument, "trials must be non-negative");
  }
  DecompositionReport report;
  report.trials = trials;
  report.degenerate = trials == 0;
  const Eigen::Index n = c.M.rows();
  if (A_src.rows() != n || A_src.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "A_src does not match the constants");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-std::numbers::pi, std::numbers::pi);
  const Mat HZ = c.H * c.Z_r.transpose();
  Vec xa(n), xb(n);
  for (int k = 0; k < trials; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) xa(i) = dist(rng);
    for (Eigen::Index i = 0; i < n; ++i) xb(i) = dist(rng);
    const Vec ds = Sigma(map, xa) - Sigma(map, xb);
    const double r = (A_src * ds - c.M * (xa - xb) - HZ * ds).norm();
    report.max_residual = std::max(report.max_residual, r);
  }
  if (!(report.max_residual <= tolerance::kDecomposition)) {
    std::ostringstream os;
    os << "canonical decomposition residual " << report.max_residual
       << " exceeds " << tolerance::kDecomposition;
    throw Error(ErrorCode::kDecompositionInvalid, os.str());
  }
  return report;
}

AdaptationRate::AdaptationRate(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::kNonPositiveParameter, "adaptation rate must be positive");
  }
}

AdaptationRate::AdaptationRate(Mat gamma) {
  if (!PdCheck(gamma)) {
    throw Error(ErrorCode::kNonPositiveParameter,
                "adaptation matrix must be symmetric positive definite");
  }
  inverse_ = gamma.inverse();
  matrix_ = std::move(gamma);
}

void AdaptationRate::CheckDim(Eigen::Index dim, const char* what) const {
  if (matrix_ && matrix_->rows() != dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + " has size " + std::to_string(matrix_->rows()) +
                    ", expected " + std::to_string(dim));
  }
}

LeaderState LeaderState::Zero(int n, int p, int l, bool saturation) {
  LeaderState s;
  s.K_m = Mat::Zero(n, p);
  s.K_r = Mat::Zero(p, p);
  s.Theta = Mat::Zero(l, p);
  s.K_p = Mat::Zero(p, p);
  s.e_p = Vec::Zero(n);
  s.saturation = saturation;
  return s;
}

Vec LeaderXi(const Vec& u_m, const Vec& sigma_1, const Vec& sigma_m,
             const Vec& e_1, const ControllerConstants& c) {
  CheckLength(u_m, c.p(), "u_m");
  CheckLength(sigma_1, c.n(), "sigma_1");
  CheckLength(sigma_m, c.n(), "sigma_m");
  CheckLength(e_1, c.n(), "e_1");
  return AugmentedInput(u_m, sigma_1, sigma_m, e_1, c);
}

Vec LeaderControl(const LeaderState& s, const Vec& sigma, const Vec& xi,
                  const Vec& phi) {
  CheckLength(sigma, s.K_m.rows(), "sigma");
  CheckLength(xi, s.K_r.rows(), "xi");
  CheckLength(phi, s.Theta.rows(), "phi");
  return s.K_m.transpose() * sigma + s.K_r.transpose() * xi -
         s.Theta.transpose() * phi;
}

LeaderRates LeaderGainDerivatives(const LeaderState& s,
                                  const AdaptationRates& rates,
                                  const Vec& sigma, const Vec& xi,
                                  const Vec& phi, const Vec& e,
                                  const ControllerConstants& c, const Mat& B) {
  CheckLength(e, c.n(), "e_1");
  const Vec proj = ProjectedError(c, B, e);
  LeaderRates r;
  r.K_m = AdaptiveLaw(rates.m, sigma, proj, -1.0);
  r.K_r = AdaptiveLaw(rates.r, xi, proj, -1.0);
  r.Theta = AdaptiveLaw(rates.theta, phi, proj, 1.0);
  r.K_p = Mat::Zero(s.K_p.rows(), s.K_p.cols());
  r.e_p = Vec::Zero(s.e_p.size());
  return r;
}

LeaderRates LeaderMsacGainDerivatives(const LeaderState& s,
                                      const AdaptationRates& rates,
                                      const Vec& sigma, const Vec& xi,
                                      const Vec& phi, const Vec& e,
                                      const Vec& delta_u,
                                      const ControllerConstants& c,
                                      const Mat& B) {
  if (!s.saturation) {
    throw Error(ErrorCode::kSaturationModeDisabled,
                "leader state was built without saturation");
  }
  CheckLength(e, c.n(), "e_1");
  CheckLength(delta_u, c.p(), "delta_u");
  const Vec proj = ProjectedError(c, B, Vec(e - s.e_p));
  LeaderRates r;
  r.K_m = AdaptiveLaw(rates.m, sigma, proj, -1.0);
  r.K_r = AdaptiveLaw(rates.r, xi, proj, -1.0);
  r.Theta = AdaptiveLaw(rates.theta, phi, proj, 1.0);
  r.K_p = AdaptiveLaw(rates.p, delta_u, proj, 1.0);
  r.e_p = PerformanceErrorDerivative(s.e_p, delta_u, s.K_p, c, B);
  return r;
}

Vec FollowerXi(const Vec& u_j, const Vec& sigma_i, const Vec& sigma_j,
               const Vec& e_ij, const ControllerConstants& c_j) {
  CheckLength(u_j, c_j.p(), "u_j");
  CheckLength(sigma_i, c_j.n(), "sigma_i");
  CheckLength(sigma_j, c_j.n(), "sigma_j");
  CheckLength(e_ij, c_j.n(), "e_ij");
  return AugmentedInput(u_j, sigma_i, sigma_j, e_ij, c_j);
}

Vec FollowerControl(const FollowerState& s,
                    const std::vector<NeighborSignals>& neighbors,
                    const Vec& sigma_i, const Vec& Xi, const Vec& phi_i,
                    bool linear_mode) {
  if (neighbors.empty()) {
    throw Error(ErrorCode::kEmptyNeighborList, "follower has no in-neighbors");
  }
  if (neighbors.size() != s.edges.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "neighbor data does not match the follower's edges");
  }
  CheckLength(sigma_i, s.K_m.rows(), "sigma_i");
  CheckLength(Xi, s.K_m.rows(), "Xi");
  Vec u = s.K_m.transpose() * Xi;
  for (std::size_t k = 0; k < neighbors.size(); ++k) {
    const auto& nb = neighbors[k];
    const auto& edge = s.edges[k];
    u += edge.K.transpose() * nb.sigma + edge.K_r.transpose() * nb.xi;
    if (!linear_mode) u += edge.Theta.transpose() * nb.phi;
  }
  if (!linear_mode) u -= s.Theta.transpose() * phi_i;
  return u;
}

FollowerRates FollowerGainDerivatives(
    const FollowerState& s, const AdaptationRates& rates,
    const std::vector<NeighborSignals>& neighbors, const Vec& Xi,
    const Vec& phi_i, const Mat& B_i, bool linear_mode) {
  return FollowerLaws(s, rates, neighbors, Xi, phi_i, nullptr, B_i, linear_mode);
}

FollowerRates MsacGainDerivatives(const FollowerState& s,
                                  const AdaptationRates& rates,
                                  const std::vector<NeighborSignals>& neighbors,
                                  const Vec& Xi, const Vec& phi_i,
                                  const Vec& delta_u, const Mat& B_i,
                                  bool linear_mode) {
  if (!s.saturation) {
    throw Error(ErrorCode::kSaturationModeDisabled,
                "follower state was built without saturation");
  }
  CheckLength(delta_u, B_i.cols(), "delta_u");
  return FollowerLaws(s, rates, neighbors, Xi, phi_i, &delta_u, B_i, linear_mode);
}

void SaturationSpec::Validate(int p) const {
  if (u_max.size() != p) {
    throw Error(ErrorCode::kDimensionMismatch, "u_max must have one entry per input");
  }
  for (Eigen::Index k = 0; k < u_max.size(); ++k) {
    if (!(u_max(k) > 0.0)) {
      throw Error(ErrorCode::kNonPositiveParameter, "u_max entries must be positive");
    }
  }
}

SaturationResult Saturate(const Vec& u, const SaturationSpec& spec) {
  CheckLength(u, spec.u_max.size(), "u");
  SaturationResult r;
  r.u_sat = u;
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const double lim = spec.u_max(k);
    if (u(k) > lim) r.u_sat(k) = lim;
    if (u(k) < -lim) r.u_sat(k) = -lim;
  }
  r.delta = u - r.u_sat;
  return r;
}

Vec PerformanceErrorDerivative(const Vec& e_p, const Vec& delta_u,
                               const Mat& K_p, const ControllerConstants& c,
                               const Mat& B) {
  CheckLength(e_p, c.n(), "e_p");
  CheckLength(delta_u, K_p.rows(), "delta_u");
  return c.A_H * e_p + B * (K_p.transpose() * delta_u);
}

}  // namespace syncnet
