// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/plugins/gaussian_mixture.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/digamma.hpp>

#include "odaframe/common/error.hpp"

namespace oda {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

MatrixXd cholesky_or_throw(const MatrixXd& cov) {
  Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::kInvalidArgument, "covariance is not positive-definite");
  return llt.matrixL();
}

std::vector<std::size_t> kmeans_plus_plus(const MatrixXd& x, std::size_t k, std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<std::size_t> centers;
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  centers.push_back(first(rng));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = (x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(centers[0]))).squaredNorm();
  while (centers.size() < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick;
    if (total <= 0.0) {
      pick = first(rng);
    } else {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        target -= d2[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    }
    centers.push_back(pick);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(pick))).squaredNorm());
    }
  }
  return centers;
}

struct Posterior {
  VectorXd nk, alpha, beta, nu;
  MatrixXd means;                 // k x d
  std::vector<MatrixXd> chol;     // lower factor of covariance (C_k / nu_k)
  std::vector<MatrixXd> covariance;
};

class VariationalFit {
 public:
  VariationalFit(const MatrixXd& x, const GmmParams& p) : x_(x), p_(p) {
    n_ = static_cast<std::size_t>(x.rows());
    d_ = static_cast<std::size_t>(x.cols());
    k_ = p.max_components;
    mean_prior_ = x.colwise().mean().transpose();
    if (n_ > 1) {
      MatrixXd centered = x.rowwise() - mean_prior_.transpose();
      cov_prior_ = p.covariance_prior_scale * centered.transpose() * centered / static_cast<double>(n_ - 1);
    } else {
      cov_prior_ = MatrixXd::Zero(static_cast<Eigen::Index>(d_), static_cast<Eigen::Index>(d_));
    }
  }

  Posterior run(MatrixXd resp) {
    Posterior post = m_step(resp);
    for (std::size_t it = 0; it < p_.max_iterations; ++it) {
      resp = e_step(post);
      Posterior next = m_step(resp);
      const double change = (next.nk - post.nk).cwiseAbs().maxCoeff();
      post = std::move(next);
      if (change <= p_.tolerance * static_cast<double>(n_)) break;
    }
    return post;
  }

 private:
  Posterior m_step(const MatrixXd& resp) const {
    const auto k = static_cast<Eigen::Index>(k_);
    const auto d = static_cast<Eigen::Index>(d_);
    Posterior post;
    post.nk = resp.colwise().sum().transpose().array() + 10.0 * DBL_EPSILON;
    MatrixXd xk = (resp.transpose() * x_).array().colwise() / post.nk.array();
    post.alpha = post.nk.array() + p_.concentration;
    post.beta = post.nk.array() + p_.mean_precision_prior;
    post.nu = post.nk.array() + static_cast<double>(d_);
    post.means.resize(k, d);
    for (Eigen::Index c = 0; c < k; ++c) {
      const double nk = post.nk(c);
      const VectorXd xbar = xk.row(c).transpose();
      post.means.row(c) =
          ((p_.mean_precision_prior * mean_prior_ + nk * xbar) / post.beta(c)).transpose();
      MatrixXd centered = x_.rowwise() - xbar.transpose();
      MatrixXd sk = centered.transpose() * resp.col(c).asDiagonal() * centered / nk;
      sk.diagonal().array() += p_.jitter;
      const VectorXd diff = xbar - mean_prior_;
      MatrixXd cov = cov_prior_ + nk * sk +
                     (nk * p_.mean_precision_prior / post.beta(c)) * diff * diff.transpose();
      cov /= post.nu(c);
      post.chol.push_back(cholesky_or_throw(cov));
      post.covariance.push_back(std::move(cov));
    }
    return post;
  }

  MatrixXd e_step(const Posterior& post) const {
    const auto k = static_cast<Eigen::Index>(k_);
    const auto n = static_cast<Eigen::Index>(n_);
    const double dd = static_cast<double>(d_);
    MatrixXd log_resp(n, k);
    const double alpha_sum = post.alpha.sum();
    for (Eigen::Index c = 0; c < k; ++c) {
      const MatrixXd& l = post.chol[static_cast<std::size_t>(c)];
      const double log_det_prec_chol = -l.diagonal().array().log().sum();
      double log_lambda = dd * std::log(2.0);
      for (std::size_t i = 0; i < d_; ++i)
        log_lambda += boost::math::digamma(0.5 * (post.nu(c) - static_cast<double>(i)));
      const double log_weight =
          boost::math::digamma(post.alpha(c)) - boost::math::digamma(alpha_sum);
      const double constant = log_weight + log_det_prec_chol - 0.5 * dd * kLog2Pi -
                              0.5 * dd * std::log(post.nu(c)) +
                              0.5 * (log_lambda - dd / post.beta(c));
      MatrixXd centered = (x_.rowwise() - post.means.row(c)).transpose();
      MatrixXd y = l.triangularView<Eigen::Lower>().solve(centered);
      log_resp.col(c) = (constant - 0.5 * y.colwise().squaredNorm().array()).transpose();
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mx = log_resp.row(i).maxCoeff();
      const double lse = mx + std::log((log_resp.row(i).array() - mx).exp().sum());
      log_resp.row(i).array() -= lse;
    }
    return log_resp.array().exp();
  }

  const MatrixXd& x_;
  const GmmParams& p_;
  std::size_t n_ = 0, d_ = 0, k_ = 0;
  VectorXd mean_prior_;
  MatrixXd cov_prior_;
};

}  // namespace

MixtureModel::MixtureModel(std::vector<GaussianComponent> components)
    : components_(std::move(components)) {
  for (const auto& c : components_) {
    const auto d = c.mean.size();
    if (d == 0 || c.covariance.rows() != d || c.covariance.cols() != d ||
        d != components_.front().mean.size())
      throw Error(ErrorCode::kInvalidArgument, "inconsistent mixture component shapes");
    chol_.push_back(cholesky_or_throw(c.covariance));
    log_norm_.push_back(-0.5 * static_cast<double>(d) * kLog2Pi -
                        chol_.back().diagonal().array().log().sum());
  }
}

std::size_t MixtureModel::dimensions() const noexcept {
  return components_.empty() ? 0 : static_cast<std::size_t>(components_.front().mean.size());
}

double MixtureModel::log_density(std::size_t k, const Eigen::VectorXd& x) const {
  if (x.size() != components_.at(k).mean.size())
    throw Error(ErrorCode::kInvalidArgument, "point dimensionality does not match the model");
  VectorXd y = chol_[k].triangularView<Eigen::Lower>().solve(x - components_[k].mean);
  return log_norm_[k] - 0.5 * y.squaredNorm();
}

double MixtureModel::density(std::size_t k, const Eigen::VectorXd& x) const {
  return std::exp(log_density(k, x));
}

int MixtureModel::assign(const Eigen::VectorXd& x, double threshold) const {
  if (!fitted()) throw Error(ErrorCode::kNotReady, "mixture model is not fitted");
  int best = kOutlierLabel;
  double best_score = 0.0;
  bool any_dense = false;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const double ld = log_density(k, x);
    if (std::exp(ld) >= threshold) any_dense = true;
    const double score = std::log(components_[k].weight) + ld;
    if (best == kOutlierLabel || score > best_score) {
      best = static_cast<int>(k);
      best_score = score;
    }
  }
  return any_dense ? best : kOutlierLabel;
}

MixtureModel fit_gmm(const std::vector<Eigen::VectorXd>& points, const GmmParams& params) {
  if (params.max_components == 0) throw Error(ErrorCode::kInvalidArgument, "max_components must be positive");
  if (points.size() < params.max_components)
    throw Error(ErrorCode::kInvalidArgument, "need at least " + std::to_string(params.max_components) +
                                                 " points, got " + std::to_string(points.size()));
  const auto d = points.front().size();
  if (d == 0) throw Error(ErrorCode::kInvalidArgument, "zero-dimensional points");
  MatrixXd x(static_cast<Eigen::Index>(points.size()), d);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != d) throw Error(ErrorCode::kInvalidArgument, "mixed point dimensionality");
    if (!points[i].allFinite()) throw Error(ErrorCode::kInvalidArgument, "non-finite point");
    x.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
  }

  std::mt19937_64 rng(params.seed);
  const auto centers = kmeans_plus_plus(x, params.max_components, rng);
  MatrixXd resp = MatrixXd::Zero(x.rows(), static_cast<Eigen::Index>(params.max_components));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::size_t best = 0;
    double best_d = 0.0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double dist = (x.row(i) - x.row(static_cast<Eigen::Index>(centers[c]))).squaredNorm();
      if (c == 0 || dist < best_d) {
        best = c;
        best_d = dist;
      }
    }
    resp(i, static_cast<Eigen::Index>(best)) = 1.0;
  }

  VariationalFit fit(x, params);
  const Posterior post = fit.run(std::move(resp));

  const double floor = params.prune_floor > 0.0
                           ? params.prune_floor
                           : 1.0 / (10.0 * static_cast<double>(params.max_components));
  const double alpha_sum = post.alpha.sum();
  std::vector<GaussianComponent> kept;
  double kept_weight = 0.0;
  for (Eigen::Index c = 0; c < post.alpha.size(); ++c) {
    const double w = post.alpha(c) / alpha_sum;
    if (w < floor) continue;
    kept.push_back({w, post.means.row(c).transpose(), post.covariance[static_cast<std::size_t>(c)]});
    kept_weight += w;
  }
  for (auto& c : kept) c.weight /= kept_weight;
  std::sort(kept.begin(), kept.end(), [](const GaussianComponent& a, const GaussianComponent& b) {
    return std::lexicographical_compare(a.mean.begin(), a.mean.end(), b.mean.begin(), b.mean.end());
  });
  return MixtureModel(std::move(kept));
}

}  // namespace oda
