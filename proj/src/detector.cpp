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

#include "oodkit/detector.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>

#include "oodkit/eigen_adapter.hpp"
#include "oodkit/hash.hpp"
#include "oodkit/tensor_io.hpp"

namespace oodkit {

const std::vector<std::string> kAllMethods = {
    "msp",  "maxlogit",        "energy",       "kl_matching", "knn",
    "mahalanobis", "rel_mahalanobis", "react_energy", "vim",         "cosine"};

bool is_known_method(const std::string& method) {
  return std::find(kAllMethods.begin(), kAllMethods.end(), method) !=
         kAllMethods.end();
}

KlGrouping kl_grouping_from_string(const std::string& text) {
  if (text == "predicted") return KlGrouping::predicted;
  if (text == "labels") return KlGrouping::labels;
  throw std::invalid_argument("unknown KL grouping '" + text +
                              "' (expected 'predicted' or 'labels')");
}

CosineMode cosine_mode_from_string(const std::string& text) {
  if (text == "normalized") return CosineMode::normalized;
  if (text == "verbatim") return CosineMode::verbatim;
  throw std::invalid_argument("unknown cosine mode '" + text +
                              "' (expected 'normalized' or 'verbatim')");
}

std::string to_string(KlGrouping grouping) {
  return grouping == KlGrouping::predicted ? "predicted" : "labels";
}

std::string to_string(CosineMode mode) {
  return mode == CosineMode::normalized ? "normalized" : "verbatim";
}

std::vector<std::string> DetectorConfig::resolved_methods() const {
  if (methods.empty()) return kAllMethods;
  std::vector<std::string> out;
  for (const std::string& m : methods) {
    if (!is_known_method(m)) {
      throw std::invalid_argument("unknown method '" + m + "'");
    }
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

namespace {

std::vector<std::int64_t> labels_vector(const FeaturePack& pack) {
  if (!pack.labels) {
    throw std::invalid_argument("train pack has no labels");
  }
  const auto raw = pack.labels->i32();
  return {raw.begin(), raw.end()};
}

}  // namespace

Eigen::MatrixXd resolve_logits(const FeaturePack& pack,
                               const std::optional<ClassifierHead>& head,
                               std::ostream* warn, std::string* source) {
  if (pack.logits) {
    if (head && warn) {
      *warn << "note: pack supplies logits; they take precedence over the "
               "classifier head\n";
    }
    if (source) *source = "supplied";
    return to_matrix(*pack.logits);
  }
  if (head) {
    if (source) *source = "derived";
    return to_matrix(logits_from_features(pack.features, *head));
  }
  throw std::invalid_argument(
      "no logits: the pack supplies none and no classifier head was given to "
      "derive them");
}

GaussianStats fit_gaussian(const FeaturePack& train, double jitter_scale) {
  const Eigen::MatrixXd features = to_matrix(train.features);
  const std::vector<std::int64_t> labels = labels_vector(train);

  GaussianStats stats;
  auto [means, counts] = class_means(features, labels, train.num_classes);
  stats.class_means = std::move(means);
  stats.class_counts = std::move(counts);
  stats.total_count = static_cast<std::int64_t>(features.rows());
  stats.shared_cov = shared_covariance(features, labels, stats.class_means);
  std::tie(stats.shared_precision, stats.shared_lambda) =
      regularized_precision(stats.shared_cov, jitter_scale);
  std::tie(stats.global_mean, stats.global_cov) = global_gaussian(features);
  std::tie(stats.global_precision, stats.global_lambda) =
      regularized_precision(stats.global_cov, jitter_scale);
  return stats;
}

KnnIndex fit_knn(const FeaturePack& train, std::size_t k) {
  Eigen::MatrixXd rows = to_matrix(train.features);
  const auto n = static_cast<std::size_t>(rows.rows());
  if (k < 1 || k > n) {
    throw std::invalid_argument("knn K = " + std::to_string(k) +
                                " outside [1, N = " + std::to_string(n) + "]");
  }
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (norm == 0.0) {
      throw std::invalid_argument("zero-norm feature row " + std::to_string(i));
    }
    rows.row(i) /= norm;
  }
  return {std::move(rows), k};
}

KlTemplates fit_kl_templates(const FeaturePack& train,
                             const std::optional<ClassifierHead>& head,
                             KlGrouping grouping, std::ostream* warn) {
  const Eigen::MatrixXd logits = resolve_logits(train, head, warn);
  const auto c = static_cast<std::size_t>(logits.cols());
  const auto n = logits.rows();
  if (n < 1) throw std::invalid_argument("empty pack");

  std::vector<std::int64_t> groups;
  if (grouping == KlGrouping::labels) {
    groups = labels_vector(train);
  } else {
    groups.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      // Argmax with ties broken to the lowest class index.
      Eigen::Index best = 0;
      for (Eigen::Index j = 1; j < logits.cols(); ++j) {
        if (logits(i, j) > logits(i, best)) best = j;
      }
      groups.push_back(best);
    }
  }

  KlTemplates kl;
  kl.templates = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(c),
                                       static_cast<Eigen::Index>(c));
  kl.present.assign(c, false);
  std::vector<std::int64_t> counts(c, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto g = static_cast<std::size_t>(groups[static_cast<std::size_t>(i)]);
    if (g >= c) {
      throw std::invalid_argument("label " + std::to_string(g) +
                                  " out of range for " + std::to_string(c) +
                                  " logit columns");
    }
    kl.templates.row(static_cast<Eigen::Index>(g)) +=
        stable_softmax(logits.row(i).transpose()).transpose();
    ++counts[g];
  }
  for (std::size_t j = 0; j < c; ++j) {
    if (counts[j] > 0) {
      kl.templates.row(static_cast<Eigen::Index>(j)) /=
          static_cast<double>(counts[j]);
      kl.present[j] = true;
    }
  }
  return kl;
}

std::size_t vim_principal_dim(std::size_t feature_dim) {
  if (feature_dim >= 2048) return 1000;
  if (feature_dim >= 768) return 512;
  // Round half to even, clamped to at least one dimension.
  const int old_mode = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double rounded = std::nearbyint(static_cast<double>(feature_dim) / 2.0);
  std::fesetround(old_mode);
  return std::max<std::size_t>(1, static_cast<std::size_t>(rounded));
}

VimParams fit_vim(const FeaturePack& train,
                  const std::optional<ClassifierHead>& head,
                  std::ostream* warn) {
  if (!head) {
    throw std::invalid_argument("vim requires a classifier head (for u)");
  }
  const Eigen::MatrixXd features = to_matrix(train.features);
  if (features.rows() < 2) {
    throw std::invalid_argument("vim needs at least two train rows");
  }
  const Eigen::MatrixXd logits = resolve_logits(train, head, warn);

  VimParams vim;
  const Eigen::MatrixXd w = to_matrix(head->weight);  // d x C
  const Eigen::VectorXd b = to_vector(head->bias);
  vim.u = -(pinv(w.transpose()) * b);

  const auto d = static_cast<std::size_t>(features.cols());
  vim.d_principal = vim_principal_dim(d);
  if (vim.d_principal >= d) {
    throw std::invalid_argument(
        "vim principal dimension D = " + std::to_string(vim.d_principal) +
        " must be smaller than the feature dimension d = " + std::to_string(d));
  }

  const Eigen::MatrixXd offset = features.rowwise() - vim.u.transpose();
  const Eigen::MatrixXd scatter = offset.transpose() * offset;  // F^T F
  vim.r = sym_eig_topk(scatter, vim.d_principal).second;

  double residual_sum = 0.0;
  double max_logit_sum = 0.0;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const Eigen::VectorXd h_tilde = offset.row(i).transpose();
    const Eigen::VectorXd residual = h_tilde - vim.r * (vim.r.transpose() * h_tilde);
    residual_sum += residual.norm();
    max_logit_sum += logits.row(i).maxCoeff();
  }
  if (residual_sum == 0.0) {
    throw std::runtime_error("degenerate residuals: every train row lies in "
                             "the principal space");
  }
  vim.alpha = max_logit_sum / residual_sum;
  if (!(vim.alpha > 0.0)) {
    throw std::runtime_error("vim alpha must be positive, got " +
                             std::to_string(vim.alpha) +
                             " (non-positive mean max logit)");
  }
  return vim;
}

ReactParams fit_react(const FeaturePack& train) {
  const Eigen::MatrixXd features = to_matrix(train.features);
  if (features.size() == 0) throw std::invalid_argument("empty pack");
  std::vector<double> activations;
  activations.reserve(static_cast<std::size_t>(features.size()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      activations.push_back(features(i, j));
    }
  }
  return {percentile_nearest_rank(std::move(activations), 0.99)};
}

CosineConcepts fit_cosine(const FeaturePack& train) {
  const Eigen::MatrixXd features = to_matrix(train.features);
  const std::vector<std::int64_t> labels = labels_vector(train);
  CosineConcepts cosine;
  cosine.concepts = class_means(features, labels, train.num_classes).first;
  for (Eigen::Index c = 0; c < cosine.concepts.rows(); ++c) {
    if (cosine.concepts.row(c).norm() == 0.0) {
      throw std::invalid_argument("cosine concept for class " +
                                  std::to_string(c) + " has zero norm");
    }
  }
  return cosine;
}

FitOutcome fit_all(const FeaturePack& train,
                   const std::optional<ClassifierHead>& head,
                   const DetectorConfig& config, std::ostream* warn) {
  if (train.rows() == 0 || train.dim() == 0) {
    throw std::invalid_argument("empty pack");
  }
  const std::vector<std::string> methods = config.resolved_methods();
  const std::set<std::string> wanted(methods.begin(), methods.end());
  auto any_of = [&](std::initializer_list<const char*> names) {
    return std::any_of(names.begin(), names.end(),
                       [&](const char* n) { return wanted.count(n) > 0; });
  };

  FitOutcome outcome;
  DetectorState& state = outcome.state;
  state.config = config;
  state.config.methods = methods;
  state.train_hash = sha256_hex(tensor_to_bytes(train.features));
  if (head) {
    const ValidationReport head_report = validate_head(*head);
    if (!head_report.ok) {
      throw std::invalid_argument(head_report.violations.front());
    }
    state.head_w = to_matrix(head->weight);
    state.head_b = to_vector(head->bias);
  }

  auto attempt = [&](const char* method, auto&& fit) {
    try {
      fit();
    } catch (const std::exception& e) {
      outcome.errors.push_back(std::string(method) + ": " + e.what());
    }
  };

  // The logit-based trio (msp, maxlogit, energy) needs no fitted statistic;
  // it only requires logits at score time.
  if (any_of({"mahalanobis", "rel_mahalanobis"})) {
    attempt("mahalanobis", [&] {
      state.gaussian = fit_gaussian(train, config.jitter_scale);
    });
  }
  if (wanted.count("knn")) {
    attempt("knn", [&] { state.knn = fit_knn(train, config.knn_k); });
  }
  if (wanted.count("kl_matching")) {
    attempt("kl_matching", [&] {
      state.kl = fit_kl_templates(train, head, config.kl_grouping, warn);
    });
  }
  if (wanted.count("vim")) {
    attempt("vim", [&] { state.vim = fit_vim(train, head, warn); });
  }
  if (wanted.count("react_energy")) {
    attempt("react_energy", [&] { state.react = fit_react(train); });
  }
  if (wanted.count("cosine")) {
    attempt("cosine", [&] {
      if (state.gaussian) {
        // Same definition; reuse the means already fitted.
        CosineConcepts cosine;
        cosine.concepts = state.gaussian->class_means;
        for (Eigen::Index c = 0; c < cosine.concepts.rows(); ++c) {
          if (cosine.concepts.row(c).norm() == 0.0) {
            throw std::invalid_argument("cosine concept for class " +
                                        std::to_string(c) + " has zero norm");
          }
        }
        state.cosine = std::move(cosine);
      } else {
        state.cosine = fit_cosine(train);
      }
    });
  }

  if (any_of({"msp", "maxlogit", "energy", "kl_matching", "vim"})) {
    if (train.logits) {
      state.logits_source = "supplied";
    } else if (head) {
      state.logits_source = "derived";
    }
  }
  return outcome;
}

}  // namespace oodkit
