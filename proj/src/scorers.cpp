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

#include "oodkit/scorers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "oodkit/eigen_adapter.hpp"
#include "oodkit/parallel.hpp"

namespace oodkit {

double score_msp(const Eigen::VectorXd& logits) {
  return stable_softmax(logits).maxCoeff();
}

double score_maxlogit(const Eigen::VectorXd& logits) {
  if (logits.size() == 0) throw std::invalid_argument("empty logits row");
  return logits.maxCoeff();
}

double score_energy(const Eigen::VectorXd& logits) {
  return log_sum_exp(logits);
}

double score_kl_matching(const Eigen::VectorXd& logits, const KlTemplates& kl) {
  const Eigen::VectorXd p = stable_softmax(logits);
  double min_kl = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < kl.present.size(); ++c) {
    if (!kl.present[c]) continue;
    const auto row = kl.templates.row(static_cast<Eigen::Index>(c));
    double div = 0.0;
    for (Eigen::Index j = 0; j < p.size(); ++j) {
      // p(j) can underflow to 0 for extreme logits; x*log(x/d) -> 0 there.
      if (p(j) > 0.0) div += p(j) * std::log(p(j) / row(j));
    }
    min_kl = std::min(min_kl, div);
  }
  if (!std::isfinite(min_kl)) {
    throw std::runtime_error("kl_matching has no present templates");
  }
  return -min_kl;
}

double score_knn(const Eigen::VectorXd& h, const KnnIndex& knn) {
  const double norm = h.norm();
  if (norm == 0.0) throw std::invalid_argument("zero-norm feature row");
  const Eigen::VectorXd z = h / norm;

  const auto n = static_cast<std::size_t>(knn.normalized_train.rows());
  // Explicit difference norms: a train row identical to z yields exactly 0,
  // which the expansion 2 - 2*dot would miss by rounding.
  std::vector<double> distances(n);
  for (std::size_t i = 0; i < n; ++i) {
    distances[i] =
        (knn.normalized_train.row(static_cast<Eigen::Index>(i)).transpose() - z)
            .norm();
  }
  auto kth = distances.begin() + static_cast<long>(knn.k - 1);
  std::nth_element(distances.begin(), kth, distances.end());
  return -*kth;
}

namespace {

double min_class_quadratic(const Eigen::VectorXd& h,
                           const Eigen::MatrixXd& means,
                           const Eigen::MatrixXd& precision,
                           double global_term = 0.0) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < means.rows(); ++c) {
    const Eigen::VectorXd delta = h - means.row(c).transpose();
    best = std::min(best, delta.dot(precision * delta) - global_term);
  }
  return best;
}

}  // namespace

double score_mahalanobis(const Eigen::VectorXd& h, const GaussianStats& g) {
  return -min_class_quadratic(h, g.class_means, g.shared_precision);
}

double score_rel_mahalanobis(const Eigen::VectorXd& h, const GaussianStats& g) {
  const Eigen::VectorXd delta = h - g.global_mean;
  const double global_term = delta.dot(g.global_precision * delta);
  return -min_class_quadratic(h, g.class_means, g.shared_precision,
                              global_term);
}

double score_react_energy(const Eigen::VectorXd& h, const ReactParams& react,
                          const Eigen::MatrixXd& w, const Eigen::VectorXd& b) {
  const Eigen::VectorXd clipped = h.cwiseMin(react.r);
  return log_sum_exp(w.transpose() * clipped + b);
}

double score_vim(const Eigen::VectorXd& h, const Eigen::VectorXd& logits,
                 const VimParams& vim) {
  const Eigen::VectorXd h_tilde = h - vim.u;
  const Eigen::VectorXd residual =
      h_tilde - vim.r * (vim.r.transpose() * h_tilde);
  const double o0 = vim.alpha * residual.norm();
  // One max-shift over the extended logit vector (o, o0).
  const double shift = std::max(logits.maxCoeff(), o0);
  const double denom =
      (logits.array() - shift).exp().sum() + std::exp(o0 - shift);
  return -std::exp(o0 - shift) / denom;
}

double score_cosine(const Eigen::VectorXd& h, const CosineConcepts& cosine,
                    CosineMode mode) {
  double h_norm = 1.0;
  if (mode == CosineMode::normalized) {
    h_norm = h.norm();
    if (h_norm == 0.0) {
      throw std::invalid_argument("zero-norm feature row in normalized mode");
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < cosine.concepts.rows(); ++c) {
    const auto concept_row = cosine.concepts.row(c);
    best = std::max(best,
                    concept_row.dot(h) / (concept_row.norm() * h_norm));
  }
  return best;
}

namespace {

struct BatchInputs {
  Eigen::MatrixXd features;  // empty unless the method reads features
  Eigen::MatrixXd logits;    // empty unless the method reads logits
};

void require(bool present, const std::string& method, const char* piece) {
  if (!present) {
    throw std::runtime_error("method '" + method + "' requires " + piece +
                             ", which the detector state does not hold");
  }
}

void check_range(const std::string& method, const std::vector<double>& values,
                 double lo, double hi) {
  constexpr double kSlack = 1e-9;
  for (double v : values) {
    if (!std::isfinite(v) || v < lo - kSlack || v > hi + kSlack) {
      throw std::runtime_error("method '" + method + "' produced score " +
                               std::to_string(v) + " outside [" +
                               std::to_string(lo) + ", " + std::to_string(hi) +
                               "]");
    }
  }
}

}  // namespace

ScoreSet score_pack(const FeaturePack& pack, const DetectorState& state,
                    const std::string& method, CosineMode cosine_mode,
                    std::ostream* warn) {
  if (!is_known_method(method)) {
    throw std::invalid_argument("unknown method '" + method + "'");
  }
  const bool needs_features =
      method == "knn" || method == "mahalanobis" ||
      method == "rel_mahalanobis" || method == "react_energy" ||
      method == "vim" || method == "cosine";
  const bool needs_logits = method == "msp" || method == "maxlogit" ||
                            method == "energy" || method == "kl_matching" ||
                            method == "vim";

  // Dependency checks first so the error names the method and missing piece.
  if (method == "kl_matching") require(state.kl.has_value(), method, "fitted KL templates");
  if (method == "knn") require(state.knn.has_value(), method, "a fitted KNN index");
  if (method == "mahalanobis" || method == "rel_mahalanobis") {
    require(state.gaussian.has_value(), method, "fitted Gaussian statistics");
  }
  if (method == "react_energy") {
    require(state.react.has_value(), method, "a fitted ReAct threshold");
    require(state.head_w.has_value(), method, "a classifier head");
  }
  if (method == "vim") require(state.vim.has_value(), method, "fitted ViM parameters");
  if (method == "cosine") require(state.cosine.has_value(), method, "fitted concept vectors");

  BatchInputs in;
  if (needs_features) {
    in.features = to_matrix(pack.features);
    const auto check_dim = [&](Eigen::Index fitted, const char* what) {
      if (in.features.cols() != fitted) {
        throw std::invalid_argument(
            "feature dimension " + std::to_string(in.features.cols()) +
            " does not match the fitted " + what + " dimension " +
            std::to_string(fitted));
      }
    };
    if (method == "knn") check_dim(state.knn->normalized_train.cols(), "index");
    if (method == "mahalanobis" || method == "rel_mahalanobis") {
      check_dim(state.gaussian->class_means.cols(), "Gaussian");
    }
    if (method == "react_energy") check_dim(state.head_w->rows(), "head");
    if (method == "vim") check_dim(state.vim->u.size(), "ViM");
    if (method == "cosine") check_dim(state.cosine->concepts.cols(), "concept");
  }
  if (needs_logits) {
    std::optional<ClassifierHead> head;
    if (state.head_w) {
      head = ClassifierHead{from_matrix(*state.head_w),
                            from_vector(*state.head_b)};
    }
    in.logits = resolve_logits(pack, head, warn);
  }

  const std::size_t n = pack.rows();
  std::vector<double> values(n);
  std::function<double(std::size_t)> row_score;
  if (method == "msp") {
    row_score = [&](std::size_t i) {
      return score_msp(in.logits.row(static_cast<Eigen::Index>(i)).transpose());
    };
  } else if (method == "maxlogit") {
    row_score = [&](std::size_t i) {
      return score_maxlogit(in.logits.row(static_cast<Eigen::Index>(i)).transpose());
    };
  } else if (method == "energy") {
    row_score = [&](std::size_t i) {
      return score_energy(in.logits.row(static_cast<Eigen::Index>(i)).transpose());
    };
  } else if (method == "kl_matching") {
    row_score = [&](std::size_t i) {
      return score_kl_matching(
          in.logits.row(static_cast<Eigen::Index>(i)).transpose(), *state.kl);
    };
  } else if (method == "knn") {
    row_score = [&](std::size_t i) {
      return score_knn(in.features.row(static_cast<Eigen::Index>(i)).transpose(),
                       *state.knn);
    };
  } else if (method == "mahalanobis") {
    row_score = [&](std::size_t i) {
      return score_mahalanobis(
          in.features.row(static_cast<Eigen::Index>(i)).transpose(),
          *state.gaussian);
    };
  } else if (method == "rel_mahalanobis") {
    row_score = [&](std::size_t i) {
      return score_rel_mahalanobis(
          in.features.row(static_cast<Eigen::Index>(i)).transpose(),
          *state.gaussian);
    };
  } else if (method == "react_energy") {
    row_score = [&](std::size_t i) {
      return score_react_energy(
          in.features.row(static_cast<Eigen::Index>(i)).transpose(),
          *state.react, *state.head_w, *state.head_b);
    };
  } else if (method == "vim") {
    row_score = [&](std::size_t i) {
      return score_vim(in.features.row(static_cast<Eigen::Index>(i)).transpose(),
                       in.logits.row(static_cast<Eigen::Index>(i)).transpose(),
                       *state.vim);
    };
  } else {  // cosine
    row_score = [&](std::size_t i) {
      return score_cosine(
          in.features.row(static_cast<Eigen::Index>(i)).transpose(),
          *state.cosine, cosine_mode);
    };
  }

  parallel_for(n, [&](std::size_t i) { values[i] = row_score(i); });

  // Batch-level post-conditions from the score definitions.
  if (method == "msp") {
    check_range(method, values, 1.0 / static_cast<double>(in.logits.cols()), 1.0);
  } else if (method == "kl_matching" || method == "knn" ||
             method == "mahalanobis") {
    check_range(method, values, -std::numeric_limits<double>::max(), 0.0);
  } else if (method == "vim") {
    check_range(method, values, -1.0, 0.0);
  } else if (method == "cosine" && cosine_mode == CosineMode::normalized) {
    check_range(method, values, -1.0, 1.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(values[i])) {
      throw std::runtime_error("method '" + method +
                               "' produced a non-finite score at row " +
                               std::to_string(i));
    }
  }

  ScoreSet scores;
  scores.method = method;
  scores.values = std::move(values);
  scores.source_role = pack.role;
  scores.state_hash = state.train_hash;
  return scores;
}

}  // namespace oodkit
