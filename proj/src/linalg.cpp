// Copyright 2026 The oodkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "oodkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace oodkit {

std::pair<Eigen::MatrixXd, std::vector<std::int64_t>> class_means(
    const Eigen::MatrixXd& features, const std::vector<std::int64_t>& labels,
    std::size_t num_classes) {
  const auto n = features.rows();
  if (static_cast<std::size_t>(n) != labels.size()) {
    throw std::invalid_argument("features row count " + std::to_string(n) +
                                " does not match label count " +
                                std::to_string(labels.size()));
  }
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(num_classes), features.cols());
  std::vector<std::int64_t> counts(num_classes, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::int64_t c = labels[static_cast<std::size_t>(i)];
    sums.row(c) += features.row(i);
    ++counts[static_cast<std::size_t>(c)];
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (counts[c] == 0) {
      throw std::invalid_argument("class " + std::to_string(c) +
                                  " has no samples");
    }
    sums.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(counts[c]);
  }
  return {std::move(sums), std::move(counts)};
}

Eigen::MatrixXd shared_covariance(const Eigen::MatrixXd& features,
                                  const std::vector<std::int64_t>& labels,
                                  const Eigen::MatrixXd& means) {
  const auto n = features.rows();
  const auto d = features.cols();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  // One streaming pass, rank-1 updates on the lower triangle in row order.
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd centered =
        features.row(i).transpose() -
        means.row(labels[static_cast<std::size_t>(i)]).transpose();
    cov.selfadjointView<Eigen::Lower>().rankUpdate(centered, 1.0);
  }
  cov /= static_cast<double>(n);
  cov.triangularView<Eigen::StrictlyUpper>() =
      cov.transpose().triangularView<Eigen::StrictlyUpper>();
  return cov;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> global_gaussian(
    const Eigen::MatrixXd& features) {
  const auto n = features.rows();
  if (n < 1) throw std::invalid_argument("global_gaussian needs at least one row");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(features.cols());
  for (Eigen::Index i = 0; i < n; ++i) mean += features.row(i).transpose();
  mean /= static_cast<double>(n);

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(features.cols(), features.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd centered = features.row(i).transpose() - mean;
    cov.selfadjointView<Eigen::Lower>().rankUpdate(centered, 1.0);
  }
  cov /= static_cast<double>(n);
  cov.triangularView<Eigen::StrictlyUpper>() =
      cov.transpose().triangularView<Eigen::StrictlyUpper>();
  return {std::move(mean), std::move(cov)};
}

std::pair<Eigen::MatrixXd, double> regularized_precision(
    const Eigen::MatrixXd& cov, double jitter_scale) {
  if (cov.rows() != cov.cols()) {
    throw std::invalid_argument("covariance must be square");
  }
  const auto d = cov.rows();
  const double trace = cov.trace();
  const double base =
      jitter_scale * (trace > 0.0 ? trace / static_cast<double>(d) : 1.0);

  // Attempt order: no jitter, then base, escalating x10 up to four times.
  double last_lambda = 0.0;
  for (int attempt = -1; attempt <= 4; ++attempt) {
    const double lambda = attempt < 0 ? 0.0 : base * std::pow(10.0, attempt);
    last_lambda = lambda;
    Eigen::MatrixXd candidate = cov;
    if (lambda > 0.0) {
      candidate.diagonal().array() += lambda;
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(candidate);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(d, d));
      if (precision.allFinite()) {
        return {std::move(precision), lambda};
      }
    }
  }
  throw std::runtime_error(
      "covariance is singular even after jitter escalation (last lambda " +
      std::to_string(last_lambda) + ")");
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> sym_eig_topk(
    const Eigen::MatrixXd& m, std::size_t k) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("eigendecomposition needs a square matrix");
  }
  const auto d = m.rows();
  if (k < 1 || static_cast<Eigen::Index>(k) > d) {
    throw std::invalid_argument("k = " + std::to_string(k) +
                                " outside [1, " + std::to_string(d) + "]");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (((m - m.transpose()).cwiseAbs().maxCoeff()) > 1e-8 * scale) {
    throw std::invalid_argument("matrix is not symmetric");
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed to converge");
  }

  // Eigen returns ascending order; take the top k from the back.
  Eigen::VectorXd values(static_cast<Eigen::Index>(k));
  Eigen::MatrixXd vectors(d, static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < k; ++j) {
    const Eigen::Index src = d - 1 - static_cast<Eigen::Index>(j);
    values(static_cast<Eigen::Index>(j)) = solver.eigenvalues()(src);
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    // Sign convention: largest-magnitude component positive, first index on
    // magnitude ties.
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (std::abs(v(i)) > best) {
        best = std::abs(v(i));
        pivot = i;
      }
    }
    if (v(pivot) < 0.0) v = -v;
    vectors.col(static_cast<Eigen::Index>(j)) = v;
  }
  return {std::move(values), std::move(vectors)};
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return Eigen::MatrixXd(m.cols(), m.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double sigma_max = svd.singularValues().size() > 0
                               ? svd.singularValues()(0)
                               : 0.0;
  const double tolerance = std::numeric_limits<double>::epsilon() *
                           static_cast<double>(std::max(m.rows(), m.cols())) *
                           sigma_max;
  Eigen::VectorXd inv_sigma = svd.singularValues();
  for (Eigen::Index i = 0; i < inv_sigma.size(); ++i) {
    inv_sigma(i) = inv_sigma(i) > tolerance ? 1.0 / inv_sigma(i) : 0.0;
  }
  return svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().transpose();
}

double percentile_nearest_rank(std::vector<double> values, double q) {
  if (values.empty()) {
    throw std::invalid_argument("percentile of an empty sequence");
  }
  if (!(q > 0.0) || q > 1.0) {
    throw std::invalid_argument("percentile q must lie in (0, 1]");
  }
  // ceil with a tiny guard so that exactly-representable products like
  // q = 0.07, M = 100 do not round up to 8 from 7.0000000000000007.
  const double m = static_cast<double>(values.size());
  auto k = static_cast<std::size_t>(std::ceil(q * m - 1e-9));
  k = std::clamp<std::size_t>(k, 1, values.size());
  std::nth_element(values.begin(), values.begin() + static_cast<long>(k - 1),
                   values.end());
  return values[k - 1];
}

Eigen::VectorXd stable_softmax(const Eigen::VectorXd& logits) {
  if (logits.size() == 0) {
    throw std::invalid_argument("softmax of an empty vector");
  }
  const double shift = logits.maxCoeff();
  Eigen::VectorXd p = (logits.array() - shift).exp();
  p /= p.sum();
  return p;
}

double log_sum_exp(const Eigen::VectorXd& x) {
  if (x.size() == 0) {
    throw std::invalid_argument("log_sum_exp of an empty vector");
  }
  const double shift = x.maxCoeff();
  return shift + std::log((x.array() - shift).exp().sum());
}

}  // namespace oodkit
