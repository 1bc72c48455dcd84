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
//
// Acceptance gate for the toolkit. Each criterion prints exactly one
// PASS/FAIL line (details indented below it) and the process exits with the
// number of failed criteria. The criteria favor independent oracles: pair
// counting for rank statistics, O(n^2) counting for the evaluation metrics,
// two-pass covariance for the streaming fit, and closed forms for the
// scorers.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "oodkit/data_model.hpp"
#include "oodkit/detector.hpp"
#include "oodkit/detector_io.hpp"
#include "oodkit/eval.hpp"
#include "oodkit/linalg.hpp"
#include "oodkit/pool_analysis.hpp"
#include "oodkit/pool_table.hpp"
#include "oodkit/scorers.hpp"
#include "oodkit/synth.hpp"
#include "oodkit/tensor.hpp"
#include "oodkit/tensor_io.hpp"

namespace fs = std::filesystem;
using namespace oodkit;

namespace {

// ---------------------------------------------------------------------------
// Reporting scaffolding.

struct Criterion {
  int id = 0;
  std::string label;
  bool ok = true;
  std::vector<std::string> details;

  // Records a hard requirement; a false condition fails the criterion.
  void require(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      details.push_back("violated: " + what);
    }
  }
  // Records an informative measurement that is printed either way.
  void note(const std::string& what) { details.push_back(what); }
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream out;
  out << std::setprecision(digits) << v;
  return out.str();
}

void print(const Criterion& c) {
  std::cout << (c.ok ? "PASS" : "FAIL") << " - criterion " << c.id << ": "
            << c.label << "\n";
  for (const std::string& line : c.details) {
    std::cout << "       " << line << "\n";
  }
}

// ---------------------------------------------------------------------------
// Small builders and file helpers shared by several criteria.

FeaturePack make_pack(std::size_t rows, std::size_t dim,
                      std::vector<double> features,
                      std::vector<std::int32_t> labels,
                      std::size_t num_classes) {
  FeaturePack pack;
  pack.features = Tensor::from_f64({rows, dim}, std::move(features));
  if (!labels.empty()) pack.labels = Tensor::from_i32({rows}, std::move(labels));
  pack.num_classes = num_classes;
  pack.role = Role::train();
  return pack;
}

FeaturePack eigen_pack(const Eigen::MatrixXd& rows,
                       std::vector<std::int32_t> labels,
                       std::size_t num_classes) {
  std::vector<double> flat(static_cast<std::size_t>(rows.size()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      flat[static_cast<std::size_t>(i * rows.cols() + j)] = rows(i, j);
    }
  }
  return make_pack(static_cast<std::size_t>(rows.rows()),
                   static_cast<std::size_t>(rows.cols()), std::move(flat),
                   std::move(labels), num_classes);
}

Eigen::VectorXd pack_row(const FeaturePack& pack, std::size_t i) {
  const std::size_t d = pack.dim();
  Eigen::VectorXd row(static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) {
    row(static_cast<Eigen::Index>(j)) = pack.features.value_as_double(i * d + j);
  }
  return row;
}

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// filename -> bytes for a flat directory.
std::map<std::string, std::string> dir_snapshot(const fs::path& dir) {
  std::map<std::string, std::string> snapshot;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      snapshot[entry.path().filename().string()] = slurp(entry.path());
    }
  }
  return snapshot;
}

int run(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// Scoped temp directory.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() /
             ("oodkit_acceptance_" + tag + "_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

// ---------------------------------------------------------------------------
// Criterion 1: the shipped pool table parses to 54 rows and the known row
// reads back exactly.

Criterion criterion_fixture_fidelity() {
  Criterion c{1, "pool-table fixture fidelity"};
  const PoolTable table = read_pool_table(fs::path(OODKIT_DATA_DIR) / "table3.csv");
  c.require(table.rows() == 54,
            "expected 54 rows, got " + std::to_string(table.rows()));

  // Locate the (wd=0.1, aug=medium1, do=0.0, adapt_lr=0.01) model.
  std::size_t hits = 0;
  std::size_t target = 0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (table.number(r, "wd") == 0.1 && table.cell(r, "aug") == "medium1" &&
        table.number(r, "do") == 0.0 && table.number(r, "adapt_lr") == 0.01) {
      ++hits;
      target = r;
    }
  }
  c.require(hits == 1, "expected exactly one target row, found " +
                           std::to_string(hits));
  if (hits == 1) {
    const double fpr = table.number(target, "maha_ninco_fpr");
    const double failed = table.number(target, "maha_n_failed");
    c.require(fpr == 31.9, "maha_ninco_fpr read back as " + fmt(fpr));
    c.require(failed == 0.0, "maha_n_failed read back as " + fmt(failed));
    c.note("54 rows; target row maha_ninco_fpr = " + fmt(fpr) +
           ", maha_n_failed = " + fmt(failed));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Criterion 2: on the wd=0.1 & adapt_lr=0.01 subset, the accuracy-vs-FPR
// rank correlation is strongly negative, and the library value equals a
// brute-force pair-counting oracle.

double brute_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) {
        ++ties_x;
        ++ties_y;
      } else if (dx == 0.0) {
        ++ties_x;
      } else if (dy == 0.0) {
        ++ties_y;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const long long n0 = static_cast<long long>(n) * (n - 1) / 2;
  return static_cast<double>(concordant - discordant) /
         std::sqrt(static_cast<double>(n0 - ties_x) *
                   static_cast<double>(n0 - ties_y));
}

Criterion criterion_correlation_direction() {
  Criterion c{2, "accuracy-vs-FPR correlation direction"};
  const PoolTable table = read_pool_table(fs::path(OODKIT_DATA_DIR) / "table3.csv");
  const PoolTable subset =
      filter_rows(table, {{"wd", "0.1"}, {"adapt_lr", "0.01"}});
  c.require(subset.rows() == 14, "expected the 14-row subset, got " +
                                     std::to_string(subset.rows()));

  const std::vector<double> x = subset.numeric_column("pre_acc");
  const std::vector<double> y = subset.numeric_column("maha_ninco_fpr");
  const double tau = kendall_tau_b(x, y);
  const double oracle = brute_tau_b(x, y);
  c.require(std::abs(tau - oracle) <= 1e-15,
            "library tau_b " + fmt(tau, 17) + " != pair-counting oracle " +
                fmt(oracle, 17));
  c.require(tau <= -0.55, "tau_b " + fmt(tau) + " is not <= -0.55");
  c.note("tau_b(pre_acc, maha_ninco_fpr) = " + fmt(tau) +
         " on 14 rows (pair-counting oracle agrees)");
  return c;
}

// ---------------------------------------------------------------------------
// Criterion 3: FPR@TPR95 and AUROC equal an O(n^2) counting oracle on 200
// random instances with injected ties.

Criterion criterion_metric_oracles() {
  Criterion c{3, "metric oracle equivalence (FPR@TPR95, AUROC)"};
  std::mt19937_64 gen(301);
  std::uniform_real_distribution<double> unif(-4.0, 4.0);
  const double qs[] = {0.80, 0.90, 0.95, 0.99, 1.00};

  std::size_t bad = 0;
  double worst_auroc_gap = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n_id = 2 + gen() % 499;   // 2 .. 500
    const std::size_t n_ood = 1 + gen() % 500;  // 1 .. 500
    const bool quantize = (gen() % 2) == 0;
    auto draw = [&]() {
      const double v = unif(gen);
      // A coarse grid forces score collisions within and across the sets.
      return quantize ? std::round(v * 2.0) / 2.0 : v;
    };
    std::vector<double> id(n_id), ood(n_ood);
    for (double& v : id) v = draw();
    for (double& v : ood) v = draw();
    // Copy a few ID values verbatim so ties straddle the two sets even in
    // the continuous case.
    for (std::size_t j = 0; j < n_ood; j += 7) ood[j] = id[j % n_id];
    const double tpr = qs[gen() % 5];

    // Oracle: sort once for tau, then count.
    std::vector<double> sorted = id;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    const auto k = static_cast<std::size_t>(
        std::ceil(tpr * static_cast<double>(n_id) - 1e-9));
    const double tau_oracle = sorted[k - 1];
    std::size_t accepted = 0;
    for (double v : ood) accepted += v >= tau_oracle ? 1 : 0;
    const double fpr_oracle =
        static_cast<double>(accepted) / static_cast<double>(n_ood);
    double pairs = 0.0;
    for (double a : id) {
      for (double b : ood) pairs += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
    }
    const double auroc_oracle =
        pairs / (static_cast<double>(n_id) * static_cast<double>(n_ood));

    const FprResult fpr = fpr_at_tpr(id, {{"noise", ood}}, tpr);
    const double auc = auroc(id, ood);
    const double gap = std::abs(auc - auroc_oracle);
    worst_auroc_gap = std::max(worst_auroc_gap, gap);
    if (fpr.tau != tau_oracle || fpr.mean_fpr != fpr_oracle || gap > 1e-12) {
      ++bad;
    }
  }
  c.require(bad == 0, std::to_string(bad) + " of 200 instances disagreed");
  c.note("200/200 instances matched (FPR exactly, AUROC within " +
         fmt(worst_auroc_gap, 3) + ")");
  return c;
}

// ---------------------------------------------------------------------------
// Criterion 4: the closed-form scorer examples reproduce to 1e-6 absolute.

Criterion criterion_closed_forms() {
  Criterion c{4, "closed-form scorer examples"};
  auto close = [&](double got, double want, const std::string& what) {
    c.require(std::abs(got - want) <= 1e-6,
              what + ": got " + fmt(got, 12) + ", want " + fmt(want, 12));
  };

  close(score_energy(vec({0, 0})), std::log(2.0), "energy of (0, 0)");

  KlTemplates kl;
  kl.templates = Eigen::MatrixXd(2, 2);
  kl.templates << 0.9, 0.1, 0.1, 0.9;
  kl.present = {true, true};
  close(score_kl_matching(vec({0, 0}), kl), -0.510825,
        "KL-matching of the uniform softmax");

  KnnIndex knn;
  knn.normalized_train = Eigen::MatrixXd(2, 2);
  knn.normalized_train << 1, 0, 0, 1;
  knn.k = 2;
  close(score_knn(vec({2, 0}), knn), -std::sqrt(2.0), "KNN k=2 from (2, 0)");
  knn.k = 1;
  close(score_knn(vec({1, 1}), knn), -0.765367, "KNN k=1 from (1, 1)");

  GaussianStats g;
  g.class_means = Eigen::MatrixXd(2, 2);
  g.class_means << 0, 0, 4, 0;
  g.shared_precision = Eigen::MatrixXd::Identity(2, 2);
  close(score_mahalanobis(vec({1, 0}), g), -1.0, "Mahalanobis at (1, 0)");

  // The ViM parameters come out of the three-point fit: offset zero, a
  // one-dimensional principal space along the first axis, and alpha = 4.
  const FeaturePack vim_train = make_pack(3, 2, {1, 0, 2, 0, 0, 1}, {}, 2);
  ClassifierHead head;
  head.weight = Tensor::from_f64({2, 2}, {1, 0, 0, 1});
  head.bias = Tensor::from_f64({2}, {0, 0});
  const VimParams vim = fit_vim(vim_train, head);
  c.require(std::abs(vim.alpha - 4.0) <= 1e-12,
            "fitted ViM alpha " + fmt(vim.alpha, 17) + " != 4");
  c.require(vim.d_principal == 1, "fitted ViM principal dimension != 1");
  close(score_vim(vec({3, 0}), vec({3, 0}), vim), -0.045279,
        "ViM with a zero residual");
  close(score_vim(vec({0, 2}), vec({0, 2}), vim), -0.997194,
        "ViM with a unit residual");

  ReactParams react{2.0};
  const Eigen::MatrixXd w = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::VectorXd b = Eigen::VectorXd::Zero(2);
  close(score_react_energy(vec({5, 1}), react, w, b), 2.313262,
        "ReAct energy of the clipped (5, 1)");

  CosineConcepts cosine;
  cosine.concepts = Eigen::MatrixXd(2, 2);
  cosine.concepts << 1, 0, 0, 1;
  close(score_cosine(vec({3, 4}), cosine, CosineMode::normalized), 0.8,
        "cosine (normalized) of (3, 4)");
  close(score_cosine(vec({3, 4}), cosine, CosineMode::verbatim), 4.0,
        "cosine (verbatim) of (3, 4)");

  if (c.ok) c.note("all closed forms within 1e-6 absolute");
  return c;
}

// ---------------------------------------------------------------------------
// Criterion 5: randomized invariance properties, >= 100 cases each.

Criterion criterion_invariances() {
  Criterion c{5, "invariance property suite"};

  // Energy shift and softmax shift-invariance of MSP / KL.
  {
    std::mt19937_64 gen(501);
    std::uniform_real_distribution<double> unif(-6.0, 6.0);
    std::size_t bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::Index dim = 2 + static_cast<Eigen::Index>(gen() % 7);
      Eigen::VectorXd o(dim);
      for (Eigen::Index i = 0; i < dim; ++i) o(i) = unif(gen);
      const double a = unif(gen);
      Eigen::VectorXd shifted = o;
      shifted.array() += a;

      KlTemplates kl;
      kl.templates = Eigen::MatrixXd(dim, dim);
      for (Eigen::Index r = 0; r < dim; ++r) {
        Eigen::VectorXd raw(dim);
        for (Eigen::Index i = 0; i < dim; ++i) raw(i) = unif(gen);
        kl.templates.row(r) = stable_softmax(raw).transpose();
      }
      kl.present.assign(static_cast<std::size_t>(dim), true);

      const bool fine =
          std::abs(score_energy(shifted) - (score_energy(o) + a)) <= 1e-9 &&
          std::abs(score_msp(shifted) - score_msp(o)) <= 1e-9 &&
          std::abs(score_kl_matching(shifted, kl) -
                   score_kl_matching(o, kl)) <= 1e-9;
      bad += fine ? 0 : 1;
    }
    c.require(bad == 0, std::to_string(bad) +
                            " shift-invariance cases failed (energy/MSP/KL)");
    c.note("energy shift + MSP/KL softmax shift-invariance: 100 cases");
  }

  // Permutation invariance of MaxLogit and MSP.
  {
    std::mt19937_64 gen(502);
    std::uniform_real_distribution<double> unif(-6.0, 6.0);
    std::size_t bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t dim = 3 + gen() % 6;
      std::vector<double> values(dim);
      for (double& v : values) v = unif(gen);
      std::vector<double> shuffled = values;
      std::shuffle(shuffled.begin(), shuffled.end(), gen);
      Eigen::VectorXd o(static_cast<Eigen::Index>(dim));
      Eigen::VectorXd p(static_cast<Eigen::Index>(dim));
      for (std::size_t i = 0; i < dim; ++i) {
        o(static_cast<Eigen::Index>(i)) = values[i];
        p(static_cast<Eigen::Index>(i)) = shuffled[i];
      }
      const bool fine = score_maxlogit(o) == score_maxlogit(p) &&
                        std::abs(score_msp(o) - score_msp(p)) <= 1e-12;
      bad += fine ? 0 : 1;
    }
    c.require(bad == 0,
              std::to_string(bad) + " permutation-invariance cases failed");
    c.note("MaxLogit/MSP permutation invariance: 100 cases");
  }

  // Monotone-transform invariance of FPR, AUROC, and the failure count.
  {
    std::mt19937_64 gen(503);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    std::size_t bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n_id = 50 + gen() % 151;
      std::vector<double> id(n_id);
      for (double& v : id) v = std::round(unif(gen) * 4.0) / 4.0;
      std::vector<std::pair<std::string, std::vector<double>>> ood;
      for (int cls = 0; cls < 3; ++cls) {
        std::vector<double> values(30 + gen() % 71);
        for (double& v : values) v = std::round(unif(gen) * 4.0) / 4.0;
        ood.emplace_back("c" + std::to_string(cls), std::move(values));
      }
      auto transform = [](double v) { return std::exp(v / 2.0) + v; };
      std::vector<double> id_t = id;
      for (double& v : id_t) v = transform(v);
      auto ood_t = ood;
      for (auto& [name, values] : ood_t) {
        for (double& v : values) v = transform(v);
      }

      const FprResult before = fpr_at_tpr(id, ood, 0.95);
      const FprResult after = fpr_at_tpr(id_t, ood_t, 0.95);
      bool fine = before.mean_fpr == after.mean_fpr;
      std::vector<double> fpr_before, fpr_after;
      for (std::size_t i = 0; i < before.per_class_fpr.size(); ++i) {
        fine = fine &&
               before.per_class_fpr[i].second == after.per_class_fpr[i].second;
        fpr_before.push_back(before.per_class_fpr[i].second);
        fpr_after.push_back(after.per_class_fpr[i].second);
      }
      fine = fine && count_failed_unit_tests(fpr_before) ==
                         count_failed_unit_tests(fpr_after);
      for (const auto& [name, values] : ood) {
        const auto& transformed =
            std::find_if(ood_t.begin(), ood_t.end(),
                         [&](const auto& p) { return p.first == name; })
                ->second;
        fine = fine &&
               std::abs(auroc(id, values) - auroc(id_t, transformed)) <= 1e-12;
      }
      bad += fine ? 0 : 1;
    }
    c.require(bad == 0, std::to_string(bad) +
                            " monotone-transform invariance cases failed");
    c.note("FPR/AUROC/failure-count monotone-transform invariance: 100 cases");
  }

  // AUROC complement identity with forced ties.
  {
    std::mt19937_64 gen(504);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    std::size_t bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> a(20 + gen() % 200), b(20 + gen() % 200);
      for (double& v : a) v = std::round(unif(gen) * 3.0) / 3.0;
      for (double& v : b) v = std::round(unif(gen) * 3.0) / 3.0;
      if (std::abs(auroc(a, b) + auroc(b, a) - 1.0) > 1e-12) ++bad;
    }
    c.require(bad == 0,
              std::to_string(bad) + " AUROC complement cases failed");
    c.note("AUROC complement identity: 100 cases");
  }

  // ViM residual orthogonality: the residual of every train row is
  // orthogonal to the fitted principal basis.
  {
    std::mt19937_64 gen(505);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::size_t cases = 0, bad = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 24, d = 6, classes = 3;
      Eigen::MatrixXd rows(n, d);
      for (Eigen::Index i = 0; i < rows.size(); ++i) {
        rows(i / d, i % d) = gauss(gen);
      }
      std::vector<double> w(d * classes);
      std::vector<double> b(classes);
      for (double& v : w) v = gauss(gen);
      for (double& v : b) v = gauss(gen);
      ClassifierHead head;
      head.weight = Tensor::from_f64({d, classes}, std::move(w));
      head.bias = Tensor::from_f64({classes}, std::move(b));
      const VimParams vim = fit_vim(eigen_pack(rows, {}, classes), head);
      for (std::size_t i = 0; i < n; ++i) {
        const Eigen::VectorXd centered = rows.row(i).transpose() - vim.u;
        const Eigen::VectorXd residual =
            centered - vim.r * (vim.r.transpose() * centered);
        ++cases;
        if ((vim.r.transpose() * residual).cwiseAbs().maxCoeff() > 1e-6) ++bad;
      }
    }
    c.require(bad == 0, std::to_string(bad) + " of " + std::to_string(cases) +
                            " residuals were not orthogonal");
    c.note("ViM residual orthogonality: " + std::to_string(cases) + " cases");
  }

  // ReAct truncation: at most 1% of the train activations sit strictly above
  // the fitted cap.
  {
    std::mt19937_64 gen(506);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::size_t bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 30 + gen() % 71, d = 3 + gen() % 6;
      std::vector<double> feats(n * d);
      for (double& v : feats) v = gauss(gen);
      const FeaturePack pack = make_pack(n, d, feats, {}, 2);
      const double cap = fit_react(pack).r;
      std::size_t above = 0;
      for (double v : feats) above += v > cap ? 1 : 0;
      if (static_cast<double>(above) > 0.01 * static_cast<double>(n * d)) ++bad;
    }
    c.require(bad == 0, std::to_string(bad) + " truncation-fraction cases failed");
    c.note("ReAct truncation fraction <= 1%: 100 cases");
  }

  // Mahalanobis rotation equivariance: fitting in rotated coordinates and
  // scoring the rotated query reproduces the original score.
  {
    std::mt19937_64 gen(507);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::size_t bad = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 42, d = 4, classes = 3;
      Eigen::MatrixXd rows(n, d);
      std::vector<std::int32_t> labels(n);
      for (std::size_t i = 0; i < n; ++i) {
        labels[i] = static_cast<std::int32_t>(i % classes);
        for (std::size_t j = 0; j < d; ++j) {
          rows(i, j) = gauss(gen) + static_cast<double>(labels[i]);
        }
      }
      Eigen::MatrixXd seed(d, d);
      for (Eigen::Index i = 0; i < seed.size(); ++i) {
        seed(i / d, i % d) = gauss(gen);
      }
      const Eigen::MatrixXd rotation =
          Eigen::HouseholderQR<Eigen::MatrixXd>(seed).householderQ();

      const GaussianStats plain = fit_gaussian(eigen_pack(rows, labels, classes));
      const GaussianStats rotated =
          fit_gaussian(eigen_pack(rows * rotation, labels, classes));
      Eigen::VectorXd h(d);
      for (std::size_t j = 0; j < d; ++j) h(j) = gauss(gen);
      const double gap = std::abs(
          score_mahalanobis(h, plain) -
          score_mahalanobis(rotation.transpose() * h, rotated));
      worst = std::max(worst, gap);
      if (gap > 1e-6) ++bad;
    }
    c.require(bad == 0, std::to_string(bad) +
                            " rotation-equivariance cases failed (worst gap " +
                            fmt(worst, 3) + ")");
    c.note("Mahalanobis rotation equivariance: 100 cases (worst gap " +
           fmt(worst, 3) + ")");
  }

  return c;
}

// ---------------------------------------------------------------------------
// Criterion 6: statistical behavior on the synthetic mixture.

Criterion criterion_statistical_oracle() {
  Criterion c{6, "statistical oracle on the synthetic mixture"};
  SynthSpec spec;
  spec.num_classes = 10;
  spec.dim = 32;
  spec.per_class = 500;
  spec.within_std = 1.0;
  spec.seed = 601;

  auto evaluate_mahalanobis = [](const SynthResult& s) {
    DetectorConfig config;
    config.methods = {"mahalanobis"};
    const FitOutcome fit = fit_all(s.train, s.head, config);
    if (!fit.errors.empty()) {
      throw std::runtime_error("mahalanobis fit failed: " + fit.errors.front());
    }
    const ScoreSet id = score_pack(s.id_test, fit.state, "mahalanobis");
    const ScoreSet ood = score_pack(s.ood, fit.state, "mahalanobis");
    return evaluate(id, {{"shift", ood}});
  };

  // Far shift: six within-class standard deviations along the first axis.
  spec.shift = 6.0;
  const SynthResult far = synth_pack(spec);
  const EvalResult far_eval = evaluate_mahalanobis(far);
  c.require(far_eval.mean_auroc >= 0.999,
            "shift=6 mahalanobis AUROC = " + fmt(far_eval.mean_auroc) +
                " (need >= 0.999)");
  c.require(far_eval.mean_fpr <= 0.005,
            "shift=6 mahalanobis mean FPR@TPR95 = " + fmt(far_eval.mean_fpr) +
                " (need <= 0.005)");
  c.note("shift=6: AUROC = " + fmt(far_eval.mean_auroc) + ", FPR@TPR95 = " +
         fmt(far_eval.mean_fpr));

  // No shift: the "OOD" set is another draw from the ID mixture, so the
  // detector must be at chance.
  spec.shift = 0.0;
  const EvalResult null_eval = evaluate_mahalanobis(synth_pack(spec));
  c.require(std::abs(null_eval.mean_auroc - 0.5) <= 0.03,
            "shift=0 AUROC = " + fmt(null_eval.mean_auroc) +
                " (need 0.5 +/- 0.03)");
  c.note("shift=0: AUROC = " + fmt(null_eval.mean_auroc));

  // The fitted detector against the oracle that knows the true means and the
  // true (identity) within-class covariance.
  spec.shift = 6.0;
  GaussianStats oracle;
  oracle.class_means = far.true_means;
  oracle.shared_precision = Eigen::MatrixXd::Identity(32, 32);
  std::vector<double> id_oracle, ood_oracle;
  for (std::size_t i = 0; i < far.id_test.rows(); ++i) {
    id_oracle.push_back(score_mahalanobis(pack_row(far.id_test, i), oracle));
  }
  for (std::size_t i = 0; i < far.ood.rows(); ++i) {
    ood_oracle.push_back(score_mahalanobis(pack_row(far.ood, i), oracle));
  }
  const double auroc_oracle = auroc(id_oracle, ood_oracle);
  const double gap = std::abs(far_eval.mean_auroc - auroc_oracle);
  c.require(gap <= 0.01, "fitted-vs-oracle AUROC gap = " + fmt(gap) +
                             " (need <= 0.01)");
  c.note("fitted AUROC " + fmt(far_eval.mean_auroc) +
         " vs true-parameter oracle " + fmt(auroc_oracle) + " (gap " +
         fmt(gap, 3) + ")");
  return c;
}

// ---------------------------------------------------------------------------
// Criterion 7: numerical fitting oracles.

Criterion criterion_numerical_oracles() {
  Criterion c{7, "numerical fitting oracles"};
  std::mt19937_64 gen(701);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Streaming covariance vs an explicit two-pass oracle.
  {
    std::size_t bad = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 50 + gen() % 151, d = 3 + gen() % 6, classes = 3;
      Eigen::MatrixXd rows(n, d);
      std::vector<std::int64_t> labels(n);
      for (std::size_t i = 0; i < n; ++i) {
        labels[i] = static_cast<std::int64_t>(i % classes);
        for (std::size_t j = 0; j < d; ++j) {
          rows(i, j) = 3.0 * gauss(gen) + static_cast<double>(labels[i]);
        }
      }
      const auto [means, counts] = class_means(rows, labels, classes);
      const Eigen::MatrixXd streamed = shared_covariance(rows, labels, means);

      Eigen::MatrixXd two_pass = Eigen::MatrixXd::Zero(d, d);
      for (std::size_t i = 0; i < n; ++i) {
        const Eigen::VectorXd rel =
            rows.row(i).transpose() -
            means.row(static_cast<Eigen::Index>(labels[i])).transpose();
        two_pass += rel * rel.transpose();
      }
      two_pass /= static_cast<double>(n);
      const double rel_err =
          (streamed - two_pass).norm() / std::max(1.0, two_pass.norm());
      if (rel_err > 1e-8) ++bad;

      const auto [global_mean, global_cov] = global_gaussian(rows);
      Eigen::MatrixXd global_two_pass = Eigen::MatrixXd::Zero(d, d);
      for (std::size_t i = 0; i < n; ++i) {
        const Eigen::VectorXd rel = rows.row(i).transpose() - global_mean;
        global_two_pass += rel * rel.transpose();
      }
      global_two_pass /= static_cast<double>(n);
      if ((global_cov - global_two_pass).norm() /
              std::max(1.0, global_two_pass.norm()) >
          1e-8) {
        ++bad;
      }
    }
    c.require(bad == 0, std::to_string(bad) + " covariance trials off");
    c.note("streaming vs two-pass covariance: 50 trials <= 1e-8 relative");
  }

  // Regularized precision multiplies back to the identity.
  {
    std::size_t bad = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::Index d = 3 + static_cast<Eigen::Index>(gen() % 6);
      Eigen::MatrixXd b(d, d);
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i / d, i % d) = gauss(gen);
      const Eigen::MatrixXd cov =
          b.transpose() * b + 0.1 * Eigen::MatrixXd::Identity(d, d);
      const auto [precision, lambda] = regularized_precision(cov);
      const Eigen::MatrixXd jittered =
          cov + lambda * Eigen::MatrixXd::Identity(d, d);
      if ((precision * jittered - Eigen::MatrixXd::Identity(d, d))
              .cwiseAbs()
              .maxCoeff() > 1e-6) {
        ++bad;
      }
    }
    // A rank-deficient input must be rescued by the jitter and still invert.
    Eigen::MatrixXd degenerate = Eigen::MatrixXd::Zero(2, 2);
    degenerate(0, 0) = 1.0;
    const auto [precision, lambda] = regularized_precision(degenerate);
    const Eigen::MatrixXd jittered =
        degenerate + lambda * Eigen::MatrixXd::Identity(2, 2);
    if (lambda <= 0.0 ||
        (precision * jittered - Eigen::MatrixXd::Identity(2, 2))
                .cwiseAbs()
                .maxCoeff() > 1e-6) {
      ++bad;
    }
    c.require(bad == 0, std::to_string(bad) + " precision trials off");
    c.note("precision multiply-back to identity: 51 trials <= 1e-6");
  }

  // Pseudo-inverse: all four Penrose conditions, including rank-deficient
  // inputs built as low-rank products.
  {
    std::size_t bad = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::Index rows = 2 + static_cast<Eigen::Index>(gen() % 5);
      const Eigen::Index cols = 2 + static_cast<Eigen::Index>(gen() % 5);
      const Eigen::Index rank =
          1 + static_cast<Eigen::Index>(gen() % std::min(rows, cols));
      Eigen::MatrixXd left(rows, rank), right(rank, cols);
      for (Eigen::Index i = 0; i < left.size(); ++i) {
        left(i / rank, i % rank) = gauss(gen);
      }
      for (Eigen::Index i = 0; i < right.size(); ++i) {
        right(i / cols, i % cols) = gauss(gen);
      }
      const Eigen::MatrixXd m = left * right;
      const Eigen::MatrixXd p = pinv(m);
      const bool fine =
          (m * p * m - m).cwiseAbs().maxCoeff() <= 1e-6 &&
          (p * m * p - p).cwiseAbs().maxCoeff() <= 1e-6 &&
          ((m * p).transpose() - m * p).cwiseAbs().maxCoeff() <= 1e-6 &&
          ((p * m).transpose() - p * m).cwiseAbs().maxCoeff() <= 1e-6;
      bad += fine ? 0 : 1;
    }
    c.require(bad == 0, std::to_string(bad) + " Penrose trials off");
    c.note("pseudo-inverse Penrose conditions: 50 trials <= 1e-6");
  }

  // Eigendecomposition reconstructs the input.
  {
    std::size_t bad = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::Index d = 2 + static_cast<Eigen::Index>(gen() % 7);
      Eigen::MatrixXd b(d, d);
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i / d, i % d) = gauss(gen);
      const Eigen::MatrixXd m = 0.5 * (b + b.transpose());
      const auto [values, vectors] =
          sym_eig_topk(m, static_cast<std::size_t>(d));
      const Eigen::MatrixXd rebuilt =
          vectors * values.asDiagonal() * vectors.transpose();
      if ((rebuilt - m).cwiseAbs().maxCoeff() > 1e-6) ++bad;
    }
    c.require(bad == 0, std::to_string(bad) + " reconstruction trials off");
    c.note("eigendecomposition reconstruction: 50 trials <= 1e-6");
  }

  return c;
}

// ---------------------------------------------------------------------------
// Criterion 8: round-trips are bit-exact and the CLI is byte-deterministic.

Criterion criterion_round_trips() {
  Criterion c{8, "round-trips (tensor files, detector state, CLI)"};
  TempDir work("roundtrip");

  // Tensor bytes: every dtype at every rank 0..4.
  {
    std::size_t bad = 0, cases = 0;
    const std::vector<std::vector<std::size_t>> shapes = {
        {}, {5}, {3, 4}, {2, 3, 2}, {2, 2, 2, 2}};
    for (const auto& shape : shapes) {
      const std::size_t count = shape_element_count(shape);
      std::vector<float> f32(count);
      std::vector<double> f64(count);
      std::vector<std::int32_t> i32(count);
      for (std::size_t i = 0; i < count; ++i) {
        f32[i] = 0.5f * static_cast<float>(i) - 2.25f;
        f64[i] = std::sin(static_cast<double>(i) + 0.5);
        i32[i] = static_cast<std::int32_t>(7 * i) - 3;
      }
      const Tensor tensors[] = {Tensor::from_f32(shape, f32),
                                Tensor::from_f64(shape, f64),
                                Tensor::from_i32(shape, i32)};
      for (const Tensor& t : tensors) {
        ++cases;
        const std::string bytes = tensor_to_bytes(t);
        const Tensor back = tensor_from_bytes(bytes);
        const fs::path file = work.path / ("t" + std::to_string(cases) + ".oodt");
        write_tensor(t, file);
        const Tensor from_file = read_tensor(file);
        if (tensor_to_bytes(back) != bytes || !back.same_contents(t) ||
            back.shape() != t.shape() || slurp(file) != bytes ||
            !from_file.same_contents(t)) {
          ++bad;
        }
      }
    }
    c.require(bad == 0, std::to_string(bad) + " tensor round-trips broke");
    c.note("tensor round-trips: " + std::to_string(cases) +
           " dtype/rank combinations bit-exact");
  }

  // Detector state: save -> load -> save reproduces the directory.
  {
    SynthSpec spec;
    spec.num_classes = 3;
    spec.dim = 8;
    spec.per_class = 40;
    spec.seed = 801;
    const SynthResult s = synth_pack(spec);
    DetectorConfig config;
    config.knn_k = 10;
    const FitOutcome fit = fit_all(s.train, s.head, config);
    c.require(fit.errors.empty(), "full fit reported errors");

    const fs::path dir_a = work.path / "state_a";
    const fs::path dir_b = work.path / "state_b";
    save_state(fit.state, dir_a);
    const DetectorState loaded = load_state(dir_a);
    save_state(loaded, dir_b);
    c.require(dir_snapshot(dir_a) == dir_snapshot(dir_b),
              "state save/load/save changed bytes");
    c.note("detector state save/load/save is byte-identical (" +
           std::to_string(dir_snapshot(dir_a).size()) + " files)");
  }

  // CLI determinism: the same pipeline run twice produces the same bytes at
  // every stage.
  {
    const std::string bin = OODKIT_BIN_PATH;
    const std::string quiet = " 2>> " + q(work.path / "stderr.log");
    {
      std::ofstream spec(work.path / "spec.json");
      spec << R"({"num_classes":3,"dim":8,"per_class":40,"shift":12.0,"seed":2})";
    }
    bool all_ok = true;
    for (const char* tag : {"a", "b"}) {
      const fs::path base = work.path / tag;
      const fs::path synth_dir = base / "synth";
      const fs::path state_dir = base / "state";
      fs::create_directories(base);
      all_ok = all_ok &&
               run(bin + " synth --spec " + q(work.path / "spec.json") +
                   " --out " + q(synth_dir) + quiet) == 0;
      all_ok = all_ok &&
               run(bin + " fit --train " + q(synth_dir / "train.json") +
                   " --head " + q(synth_dir / "head_w.oodt") + "," +
                   q(synth_dir / "head_b.oodt") + " --knn-k 10 --out " +
                   q(state_dir) + quiet) == 0;
      for (const char* split : {"id_test", "ood_shift"}) {
        all_ok = all_ok &&
                 run(bin + " score --state " + q(state_dir) + " --data " +
                     q(synth_dir / (std::string(split) + ".json")) +
                     " --method mahalanobis --out " +
                     q(base / (std::string(split) + ".oodt")) + quiet) == 0;
      }
      all_ok = all_ok &&
               run(bin + " eval --id " + q(base / "id_test.oodt") +
                   " --ood shift=" + (base / "ood_shift.oodt").string() +
                   " --out " + q(base / "eval.json") + quiet) == 0;
    }
    c.require(all_ok, "a CLI pipeline stage exited nonzero");
    if (all_ok) {
      bool same = dir_snapshot(work.path / "a" / "synth") ==
                      dir_snapshot(work.path / "b" / "synth") &&
                  dir_snapshot(work.path / "a" / "state") ==
                      dir_snapshot(work.path / "b" / "state");
      for (const char* name :
           {"id_test.oodt", "id_test.oodt.json", "ood_shift.oodt",
            "ood_shift.oodt.json", "eval.json"}) {
        same = same &&
               slurp(work.path / "a" / name) == slurp(work.path / "b" / name);
      }
      c.require(same, "repeated CLI runs differ");
      c.note("synth/fit/score/eval pipeline run twice: byte-identical");
    }
  }

  return c;
}

}  // namespace

int main() {
  std::vector<Criterion> results;
  try {
    results.push_back(criterion_fixture_fidelity());
    results.push_back(criterion_correlation_direction());
    results.push_back(criterion_metric_oracles());
    results.push_back(criterion_closed_forms());
    results.push_back(criterion_invariances());
    results.push_back(criterion_statistical_oracle());
    results.push_back(criterion_numerical_oracles());
    results.push_back(criterion_round_trips());
  } catch (const std::exception& e) {
    // A criterion that throws is a failure of the criterion being built.
    Criterion crashed{static_cast<int>(results.size()) + 1, "aborted"};
    crashed.ok = false;
    crashed.note(std::string("unexpected exception: ") + e.what());
    results.push_back(crashed);
  }

  int failed = 0;
  for (const Criterion& c : results) {
    print(c);
    failed += c.ok ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed"
                            : std::to_string(failed) + " criterion(s) failed")
            << "\n";
  return failed;
}
