// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace oda {

inline constexpr int kOutlierLabel = -1;

struct GmmParams {
  std::size_t max_components = 8;
  /// Dirichlet concentration of the weight prior.
  double concentration = 1e-3;
  /// Precision of the mean prior, relative to each component's own. Like the
  /// covariance prior, a large value inflates far-off components.
  double mean_precision_prior = 1.0;
  /// The Wishart scale prior is this factor times the empirical covariance.
  /// When clusters are far apart relative to their spread, 1.0 lets the
  /// between-cluster variance dominate small clusters; lower it so component
  /// covariances track the data.
  double covariance_prior_scale = 1.0;
  /// Added to every covariance diagonal.
  double jitter = 1e-6;
  std::size_t max_iterations = 1000;
  /// Stop once no component's expected count moves by more than
  /// tolerance * n.
  double tolerance = 1e-9;
  /// Components with expected weight below this are dropped; 0 means
  /// 1 / (10 * max_components).
  double prune_floor = 0.0;
  std::uint64_t seed = 1;
};

struct GaussianComponent {
  double weight = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// Fitted mixture of full-covariance Gaussians.
class MixtureModel {
 public:
  MixtureModel() = default;
  /// Throws Error(kInvalidArgument) for inconsistent shapes or a covariance
  /// that is not positive-definite.
  explicit MixtureModel(std::vector<GaussianComponent> components);

  bool fitted() const noexcept { return !components_.empty(); }
  std::size_t size() const noexcept { return components_.size(); }
  std::size_t dimensions() const noexcept;
  const std::vector<GaussianComponent>& components() const noexcept { return components_; }

  double log_density(std::size_t k, const Eigen::VectorXd& x) const;
  /// N(x | mean_k, covariance_k).
  double density(std::size_t k, const Eigen::VectorXd& x) const;

  /// Index of the most responsible component, or kOutlierLabel when every
  /// component density is below `threshold`. Throws Error(kNotReady) when
  /// unfitted.
  int assign(const Eigen::VectorXd& x, double threshold) const;

 private:
  std::vector<GaussianComponent> components_;
  std::vector<Eigen::MatrixXd> chol_;  // lower Cholesky factors
  std::vector<double> log_norm_;
};

/// Variational Bayesian fit with a Dirichlet weight prior and Gauss-Wishart
/// component priors centred on the data. Initialised by k-means++ seeding
/// with hard assignment; pruned components are dropped and the surviving
/// weights renormalised. Components are ordered by mean (lexicographic).
/// Deterministic given params.seed. Throws Error(kInvalidArgument) for fewer
/// than max_components points, mixed dimensionality or non-finite values.
MixtureModel fit_gmm(const std::vector<Eigen::VectorXd>& points, const GmmParams& params);

}  // namespace oda
