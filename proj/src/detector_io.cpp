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

#include "oodkit/detector_io.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "oodkit/eigen_adapter.hpp"
#include "oodkit/tensor_io.hpp"

namespace oodkit {

namespace {

constexpr int kStateVersion = 1;

void write_matrix(const std::filesystem::path& dir, const char* name,
                  const Eigen::MatrixXd& m) {
  write_tensor(from_matrix(m), dir / (std::string(name) + ".oodt"));
}

void write_vector(const std::filesystem::path& dir, const char* name,
                  const Eigen::VectorXd& v) {
  write_tensor(from_vector(v), dir / (std::string(name) + ".oodt"));
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& dir, const char* name) {
  return to_matrix(read_tensor(dir / (std::string(name) + ".oodt")));
}

Eigen::VectorXd read_vector(const std::filesystem::path& dir, const char* name) {
  return to_vector(read_tensor(dir / (std::string(name) + ".oodt")));
}

}  // namespace

void save_state(const DetectorState& state, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  nlohmann::json j;
  j["format"] = "oodkit-state";
  j["version"] = kStateVersion;
  j["train_hash"] = state.train_hash;
  j["logits_source"] = state.logits_source;
  j["config"] = {{"methods", state.config.methods},
                 {"knn_k", state.config.knn_k},
                 {"jitter_scale", state.config.jitter_scale},
                 {"kl_grouping", to_string(state.config.kl_grouping)}};

  if (state.head_w) {
    write_matrix(dir, "head_w", *state.head_w);
    write_vector(dir, "head_b", *state.head_b);
    j["head"] = true;
  }
  if (state.gaussian) {
    const GaussianStats& g = *state.gaussian;
    write_matrix(dir, "gaussian_class_means", g.class_means);
    write_matrix(dir, "gaussian_shared_cov", g.shared_cov);
    write_matrix(dir, "gaussian_shared_precision", g.shared_precision);
    write_vector(dir, "gaussian_global_mean", g.global_mean);
    write_matrix(dir, "gaussian_global_cov", g.global_cov);
    write_matrix(dir, "gaussian_global_precision", g.global_precision);
    j["gaussian"] = {{"class_counts", g.class_counts},
                     {"total_count", g.total_count},
                     {"shared_lambda", g.shared_lambda},
                     {"global_lambda", g.global_lambda}};
  }
  if (state.knn) {
    write_matrix(dir, "knn_train", state.knn->normalized_train);
    j["knn"] = {{"k", state.knn->k}};
  }
  if (state.kl) {
    write_matrix(dir, "kl_templates", state.kl->templates);
    j["kl"] = {{"present", state.kl->present}};
  }
  if (state.vim) {
    write_vector(dir, "vim_u", state.vim->u);
    write_matrix(dir, "vim_r", state.vim->r);
    j["vim"] = {{"d_principal", state.vim->d_principal},
                {"alpha", state.vim->alpha}};
  }
  if (state.react) {
    j["react"] = {{"r", state.react->r}};
  }
  if (state.cosine) {
    write_matrix(dir, "cosine_concepts", state.cosine->concepts);
    j["cosine"] = true;
  }

  const std::filesystem::path descriptor = dir / "state.json";
  std::ofstream out(descriptor, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + descriptor.string() +
                             "' for writing");
  }
  out << j.dump(2) << "\n";
  out.flush();
  if (!out) {
    throw std::runtime_error("write failed for '" + descriptor.string() + "'");
  }
}

DetectorState load_state(const std::filesystem::path& dir) {
  const std::filesystem::path descriptor = dir / "state.json";
  std::ifstream in(descriptor);
  if (!in) {
    throw std::runtime_error("cannot open '" + descriptor.string() +
                             "' for reading");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(descriptor.string() + ": " + e.what());
  }
  if (j.value("format", "") != "oodkit-state") {
    throw std::runtime_error(descriptor.string() +
                             ": not a detector state descriptor");
  }
  if (j.value("version", 0) != kStateVersion) {
    throw std::runtime_error(descriptor.string() +
                             ": unsupported state version");
  }

  DetectorState state;
  state.train_hash = j.at("train_hash").get<std::string>();
  state.logits_source = j.value("logits_source", "");
  const nlohmann::json& config = j.at("config");
  state.config.methods = config.at("methods").get<std::vector<std::string>>();
  state.config.knn_k = config.at("knn_k").get<std::size_t>();
  state.config.jitter_scale = config.at("jitter_scale").get<double>();
  state.config.kl_grouping =
      kl_grouping_from_string(config.at("kl_grouping").get<std::string>());

  if (j.contains("head")) {
    state.head_w = read_matrix(dir, "head_w");
    state.head_b = read_vector(dir, "head_b");
  }
  if (j.contains("gaussian")) {
    GaussianStats g;
    g.class_means = read_matrix(dir, "gaussian_class_means");
    g.shared_cov = read_matrix(dir, "gaussian_shared_cov");
    g.shared_precision = read_matrix(dir, "gaussian_shared_precision");
    g.global_mean = read_vector(dir, "gaussian_global_mean");
    g.global_cov = read_matrix(dir, "gaussian_global_cov");
    g.global_precision = read_matrix(dir, "gaussian_global_precision");
    g.class_counts =
        j["gaussian"].at("class_counts").get<std::vector<std::int64_t>>();
    g.total_count = j["gaussian"].at("total_count").get<std::int64_t>();
    g.shared_lambda = j["gaussian"].at("shared_lambda").get<double>();
    g.global_lambda = j["gaussian"].at("global_lambda").get<double>();
    state.gaussian = std::move(g);
  }
  if (j.contains("knn")) {
    KnnIndex knn;
    knn.normalized_train = read_matrix(dir, "knn_train");
    knn.k = j["knn"].at("k").get<std::size_t>();
    state.knn = std::move(knn);
  }
  if (j.contains("kl")) {
    KlTemplates kl;
    kl.templates = read_matrix(dir, "kl_templates");
    kl.present = j["kl"].at("present").get<std::vector<bool>>();
    state.kl = std::move(kl);
  }
  if (j.contains("vim")) {
    VimParams vim;
    vim.u = read_vector(dir, "vim_u");
    vim.r = read_matrix(dir, "vim_r");
    vim.d_principal = j["vim"].at("d_principal").get<std::size_t>();
    vim.alpha = j["vim"].at("alpha").get<double>();
    state.vim = std::move(vim);
  }
  if (j.contains("react")) {
    state.react = ReactParams{j["react"].at("r").get<double>()};
  }
  if (j.contains("cosine")) {
    state.cosine = CosineConcepts{read_matrix(dir, "cosine_concepts")};
  }
  return state;
}

}  // namespace oodkit
