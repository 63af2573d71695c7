#include "stylemetric/distances.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "stylemetric/common.hpp"

namespace stylemetric {

DistanceMetric parse_metric(std::string_view name) {
  if (name == "w1" || name == "W1") return DistanceMetric::w1;
  if (name == "w2" || name == "W2") return DistanceMetric::w2;
  if (name == "kl" || name == "KL") return DistanceMetric::kl;
  if (name == "mkl" || name == "MKL") return DistanceMetric::mkl;
  if (name == "bc" || name == "BC") return DistanceMetric::bc;
  if (name == "bd" || name == "BD") return DistanceMetric::bd;
  throw InvalidArgument("unknown distance metric '" + std::string(name) + "'");
}

std::string_view metric_name(DistanceMetric metric) {
  switch (metric) {
    case DistanceMetric::w1: return "w1";
    case DistanceMetric::w2: return "w2";
    case DistanceMetric::kl: return "kl";
    case DistanceMetric::mkl: return "mkl";
    case DistanceMetric::bc: return "bc";
    case DistanceMetric::bd: return "bd";
  }
  return "?";
}

ActionDistribution ActionDistribution::categorical(std::vector<double> probs,
                                                   std::size_t samples) {
  if (probs.empty()) throw InvalidArgument("categorical distribution is empty");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw InvalidArgument("categorical probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("categorical probabilities must sum to 1");
  }
  ActionDistribution d;
  d.kind = Kind::categorical;
  d.probs = std::move(probs);
  d.samples = samples;
  return d;
}

ActionDistribution ActionDistribution::gaussian(std::vector<double> mean, std::vector<double> cov,
                                                std::size_t samples) {
  const std::size_t n = mean.size();
  if (n == 0 || cov.size() != n * n) {
    throw InvalidArgument("gaussian summary needs a mean and a dim x dim covariance");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(cov[i * n + j] - cov[j * n + i]) > 1e-12 * (1.0 + std::abs(cov[i * n + j]))) {
        throw InvalidArgument("covariance must be symmetric");
      }
    }
  }
  ActionDistribution d;
  d.kind = Kind::gaussian;
  d.mean = std::move(mean);
  d.cov = std::move(cov);
  d.samples = samples;
  return d;
}

ActionDistribution empirical_policy(std::span<const ActionValue> records,
                                    const ActionSpace& space) {
  if (records.empty()) throw InvalidArgument("empirical_policy: no action records");
  const double n = static_cast<double>(records.size());
  if (space.kind == ActionKind::discrete) {
    std::vector<double> counts(space.size, 0.0);
    for (const auto& r : records) {
      if (!r.conforms_to(space)) throw InvalidArgument("empirical_policy: mixed action records");
      counts[r.index] += 1.0;
    }
    for (double& c : counts) c /= n;
    ActionDistribution d;
    d.kind = ActionDistribution::Kind::categorical;
    d.probs = std::move(counts);
    d.samples = records.size();
    return d;
  }
  const std::size_t dim = space.size;
  std::vector<double> mean(dim, 0.0);
  for (const auto& r : records) {
    if (!r.conforms_to(space)) throw InvalidArgument("empirical_policy: mixed action records");
    for (std::size_t k = 0; k < dim; ++k) mean[k] += r.components[k];
  }
  for (double& m : mean) m /= n;
  std::vector<double> cov(dim * dim, 0.0);
  for (const auto& r : records) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double di = r.components[i] - mean[i];
      for (std::size_t j = 0; j < dim; ++j) {
        cov[i * dim + j] += di * (r.components[j] - mean[j]);
      }
    }
  }
  for (double& c : cov) c /= n;
  for (std::size_t i = 0; i < dim; ++i) cov[i * dim + i] += kCovarianceFloor;
  ActionDistribution d;
  d.kind = ActionDistribution::Kind::gaussian;
  d.mean = std::move(mean);
  d.cov = std::move(cov);
  d.samples = records.size();
  return d;
}

namespace {

double kl_smoothed(const std::vector<double>& p, const std::vector<double>& q) {
  const double norm = 1.0 + kKlSmoothing * static_cast<double>(p.size());
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double ps = (p[i] + kKlSmoothing) / norm;
    const double qs = (q[i] + kKlSmoothing) / norm;
    kl += ps * std::log(ps / qs);
  }
  return std::max(kl, 0.0);
}

double clip_bd(double bd) { return std::clamp(bd, 0.0, kBhattacharyyaClip); }

void require_same(const ActionDistribution& p, const ActionDistribution& q,
                  ActionDistribution::Kind kind, const char* where) {
  if (p.kind != kind || q.kind != kind) {
    throw InvalidArgument(std::string(where) + ": distribution kind mismatch");
  }
  if (p.dim() != q.dim()) throw InvalidArgument(std::string(where) + ": dimension mismatch");
}

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd as_matrix(const std::vector<double>& cov, std::size_t n) {
  MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = cov[i * n + j];
  }
  return 0.5 * (m + m.transpose());
}

VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Symmetric square root with negative eigenvalues clamped to zero.
MatrixXd sqrt_psd(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m);
  const VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

void require_psd(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -1e-9 * scale) {
    throw InvalidArgument("covariance is not positive semidefinite");
  }
}

double gaussian_w2(const ActionDistribution& p, const ActionDistribution& q) {
  const std::size_t n = p.dim();
  const MatrixXd s1 = as_matrix(p.cov, n);
  const MatrixXd s2 = as_matrix(q.cov, n);
  const MatrixXd root2 = sqrt_psd(s2);
  const MatrixXd inner = root2 * s1 * root2;
  const MatrixXd cross = sqrt_psd(0.5 * (inner + inner.transpose()));
  const double mean_term = (as_vector(p.mean) - as_vector(q.mean)).squaredNorm();
  const double w2sq = mean_term + (s1 + s2 - 2.0 * cross).trace();
  return std::sqrt(std::max(w2sq, 0.0));
}

double gaussian_bd(const ActionDistribution& p, const ActionDistribution& q) {
  const std::size_t n = p.dim();
  const MatrixXd s1 = as_matrix(p.cov, n);
  const MatrixXd s2 = as_matrix(q.cov, n);
  const MatrixXd avg = 0.5 * (s1 + s2);
  const VectorXd delta = as_vector(p.mean) - as_vector(q.mean);

  // Pseudo-inverse through the eigenbasis so singular averages stay finite.
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(avg);
  const VectorXd& vals = eig.eigenvalues();
  const double cutoff = 1e-12 * std::max(1.0, vals.cwiseAbs().maxCoeff());
  VectorXd inv(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) inv(i) = vals(i) > cutoff ? 1.0 / vals(i) : 0.0;
  const VectorXd proj = eig.eigenvectors().transpose() * delta;
  const double mahalanobis = proj.cwiseProduct(proj).dot(inv);

  const double log_det_avg = std::log(std::max(avg.determinant(), 0.0) + kDeterminantEpsilon);
  const double log_det_1 = std::log(std::max(s1.determinant(), 0.0) + kDeterminantEpsilon);
  const double log_det_2 = std::log(std::max(s2.determinant(), 0.0) + kDeterminantEpsilon);
  const double bd = mahalanobis / 8.0 + 0.5 * (log_det_avg - 0.5 * (log_det_1 + log_det_2));
  return clip_bd(bd);
}

}  // namespace

double categorical_distance(DistanceMetric metric, const ActionDistribution& p,
                            const ActionDistribution& q) {
  require_same(p, q, ActionDistribution::Kind::categorical, "categorical_distance");
  const auto& a = p.probs;
  const auto& b = q.probs;
  switch (metric) {
    case DistanceMetric::w1:
    case DistanceMetric::w2: {
      double l1 = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] - b[i]);
      const double tv = std::clamp(0.5 * l1, 0.0, 1.0);
      return metric == DistanceMetric::w1 ? tv : std::sqrt(tv);
    }
    case DistanceMetric::kl:
      return kl_smoothed(a, b);
    case DistanceMetric::mkl:
      return 0.5 * (kl_smoothed(a, b) + kl_smoothed(b, a));
    case DistanceMetric::bc:
    case DistanceMetric::bd: {
      double bc = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) bc += std::sqrt(a[i] * b[i]);
      bc = std::clamp(bc, 0.0, 1.0);
      if (metric == DistanceMetric::bc) return bc;
      return bc <= 0.0 ? kBhattacharyyaClip : clip_bd(-std::log(bc));
    }
  }
  throw InvalidArgument("unknown metric");
}

double gaussian_distance(DistanceMetric metric, const ActionDistribution& p,
                         const ActionDistribution& q) {
  require_same(p, q, ActionDistribution::Kind::gaussian, "gaussian_distance");
  const std::size_t n = p.dim();
  require_psd(as_matrix(p.cov, n));
  require_psd(as_matrix(q.cov, n));
  switch (metric) {
    case DistanceMetric::w2:
      return gaussian_w2(p, q);
    case DistanceMetric::bd:
      return gaussian_bd(p, q);
    case DistanceMetric::bc:
      return std::exp(-gaussian_bd(p, q));
    default:
      throw InvalidArgument("gaussian_distance supports w2, bd and bc only, not '" +
                            std::string(metric_name(metric)) + "'");
  }
}

double action_distance(DistanceMetric metric, const ActionDistribution& p,
                       const ActionDistribution& q) {
  if (p.kind == ActionDistribution::Kind::categorical) return categorical_distance(metric, p, q);
  return gaussian_distance(metric, p, q);
}

}  // namespace stylemetric
