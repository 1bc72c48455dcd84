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

#ifndef OODKIT_LINALG_HPP_
#define OODKIT_LINALG_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oodkit {

// Class-conditional and global Gaussian statistics fitted on a train pack.
// Covariances use the 1/N normalization; precisions are the regularized
// inverses, with the jitter actually applied recorded alongside.
struct GaussianStats {
  Eigen::MatrixXd class_means;       // C x d, row c = mean of class c
  Eigen::MatrixXd shared_cov;        // d x d, pooled within-class covariance
  Eigen::MatrixXd shared_precision;  // d x d
  Eigen::VectorXd global_mean;       // d
  Eigen::MatrixXd global_cov;        // d x d, label-free covariance
  Eigen::MatrixXd global_precision;  // d x d
  std::vector<std::int64_t> class_counts;  // length C
  std::int64_t total_count = 0;
  double shared_lambda = 0.0;  // jitter added to shared_cov before inversion
  double global_lambda = 0.0;  // jitter added to global_cov before inversion
};

// Per-class arithmetic means. Every class 0..C-1 must be populated; an empty
// class raises std::invalid_argument naming it. Accumulation is f64 in fixed
// row order, so results are bit-stable across runs.
std::pair<Eigen::MatrixXd, std::vector<std::int64_t>> class_means(
    const Eigen::MatrixXd& features, const std::vector<std::int64_t>& labels,
    std::size_t num_classes);

// Pooled within-class covariance with 1/N normalization:
// sum_c sum_{i: y_i = c} (h_i - mu_c)(h_i - mu_c)^T / N.
// Single streaming pass over the rows in index order.
Eigen::MatrixXd shared_covariance(const Eigen::MatrixXd& features,
                                  const std::vector<std::int64_t>& labels,
                                  const Eigen::MatrixXd& means);

// Label-free mean and covariance (1/N normalization).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> global_gaussian(
    const Eigen::MatrixXd& features);

// Inverse of a symmetric positive semi-definite matrix via Cholesky. When the
// plain factorization fails, adds lambda*I with
//   lambda_1 = jitter_scale * trace(cov)/d   (or jitter_scale * 1.0 when the
//   trace is not positive, e.g. the zero matrix)
// and retries with lambda escalating x10 up to 4 times. Returns the precision
// and the lambda that succeeded (0 when no jitter was needed). Throws
// std::runtime_error when still singular after escalation.
std::pair<Eigen::MatrixXd, double> regularized_precision(
    const Eigen::MatrixXd& cov, double jitter_scale = 1e-6);

// Top-k eigenpairs of a symmetric matrix, eigenvalues in non-increasing
// order, eigenvectors orthonormal columns. Sign convention: the largest-
// magnitude component of each eigenvector is positive (first such index wins
// on magnitude ties). Throws on non-symmetric input (1e-8 relative) or k out
// of [1, d].
std::pair<Eigen::VectorXd, Eigen::MatrixXd> sym_eig_topk(
    const Eigen::MatrixXd& m, std::size_t k);

// Moore-Penrose pseudo-inverse via SVD; singular values below
// eps * max(rows, cols) * sigma_max are treated as zero.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& m);

// Nearest-rank percentile: the k-th smallest value with k = ceil(q * M),
// q in (0, 1]. Throws std::invalid_argument on an empty input or q outside
// the interval.
double percentile_nearest_rank(std::vector<double> values, double q);

// Softmax with the max subtracted before exponentiation; entries are strictly
// positive and sum to 1.
Eigen::VectorXd stable_softmax(const Eigen::VectorXd& logits);

// log(sum_i exp(x_i)) with the max factored out.
double log_sum_exp(const Eigen::VectorXd& x);

}  // namespace oodkit

#endif  // OODKIT_LINALG_HPP_
