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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "oodkit/detector.hpp"
#include "oodkit/detector_io.hpp"
#include "oodkit/eval.hpp"
#include "oodkit/pool_analysis.hpp"
#include "oodkit/pool_table.hpp"
#include "oodkit/scorers.hpp"
#include "oodkit/synth.hpp"
#include "oodkit/tensor_io.hpp"

namespace {

using namespace oodkit;

std::vector<std::string> split(const std::string& text, char separator) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(separator, start);
    parts.push_back(text.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return parts;
}

bool parse_strict_double(const std::string& text, double* out) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
    return false;
  }
  *out = value;
  return true;
}

// q lies in the half-open interval (0, 1].
const CLI::Validator OpenUnitInterval(
    [](std::string& input) -> std::string {
      double value = 0.0;
      if (!parse_strict_double(input, &value)) {
        return "'" + input + "' is not a number";
      }
      if (!(value > 0.0) || value > 1.0) {
        return "value " + input + " is outside (0, 1]";
      }
      return {};
    },
    "FLOAT in (0,1]");

const CLI::Validator MethodList(
    [](std::string& input) -> std::string {
      if (input == "all") return {};
      for (const std::string& token : split(input, ',')) {
        if (!is_known_method(token)) {
          return "unknown method '" + token + "'";
        }
      }
      return {};
    },
    "all|METHOD[,METHOD...]");

const CLI::Validator PairList(
    [](std::string& input) -> std::string {
      for (const std::string& token : split(input, ',')) {
        const std::size_t eq = token.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= token.size()) {
          return "'" + token + "' is not of the form key=value";
        }
      }
      return {};
    },
    "KEY=VALUE[,...]");

const CLI::Validator ColonPair(
    [](std::string& input) -> std::string {
      const auto parts = split(input, ':');
      if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
        return "'" + input + "' is not of the form x:y";
      }
      return {};
    },
    "X:Y");

const CLI::Validator ColonTriple(
    [](std::string& input) -> std::string {
      const auto parts = split(input, ':');
      if (parts.size() != 3 || parts[0].empty() || parts[1].empty() ||
          parts[2].empty()) {
        return "'" + input + "' is not of the form x:y:key";
      }
      return {};
    },
    "X:Y:KEY");

const CLI::Validator HeadPair(
    [](std::string& input) -> std::string {
      const auto parts = split(input, ',');
      if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
        return "'" + input + "' is not of the form weights.oodt,bias.oodt";
      }
      return {};
    },
    "W.oodt,b.oodt");

std::vector<std::pair<std::string, std::string>> parse_pairs(
    const std::vector<std::string>& raw, char separator) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const std::string& chunk : raw) {
    for (const std::string& token : split(chunk, ',')) {
      const std::size_t pos = token.find(separator);
      pairs.emplace_back(token.substr(0, pos), token.substr(pos + 1));
    }
  }
  return pairs;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------- fit

struct FitOptions {
  std::string train;
  std::string head;
  std::string methods = "all";
  std::string out;
  std::size_t knn_k = 1000;
  double jitter_scale = 1e-6;
  std::string kl_group_by = "predicted";
};

void run_fit(const FitOptions& opt) {
  const LoadedPack loaded = read_manifest(opt.train);

  std::optional<ClassifierHead> head;
  if (!opt.head.empty()) {
    const auto parts = split(opt.head, ',');
    head = ClassifierHead{read_tensor(parts[0]), read_tensor(parts[1])};
  }

  DetectorConfig config;
  if (opt.methods != "all") config.methods = split(opt.methods, ',');
  config.knn_k = opt.knn_k;
  config.jitter_scale = opt.jitter_scale;
  config.kl_grouping = kl_grouping_from_string(opt.kl_group_by);

  const FitOutcome outcome = fit_all(loaded.pack, head, config, &std::cerr);
  if (!outcome.errors.empty()) {
    for (const std::string& error : outcome.errors) {
      std::cerr << "error: " << error << "\n";
    }
    throw std::runtime_error(std::to_string(outcome.errors.size()) +
                             " method fit(s) failed");
  }
  save_state(outcome.state, opt.out);
}

// ---------------------------------------------------------------- score

struct ScoreOptions {
  std::string state;
  std::string data;
  std::string method;
  std::string out;
  std::string cosine_mode = "normalized";
};

void run_score(const ScoreOptions& opt) {
  const DetectorState state = load_state(opt.state);
  const LoadedPack loaded = read_manifest(opt.data);
  const ScoreSet scores =
      score_pack(loaded.pack, state, opt.method,
                 cosine_mode_from_string(opt.cosine_mode), &std::cerr);
  write_score_set(scores, opt.out);
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
  std::string id;
  std::vector<std::string> ood;
  double q = 0.95;
  double fail_threshold = 0.10;
  std::string auc_pooling = "per_class";
  std::string out;
};

void run_eval(const EvalOptions& opt) {
  const ScoreSet id_scores = read_score_set(opt.id);
  std::vector<std::pair<std::string, ScoreSet>> ood_scores;
  for (const auto& [name, path] : parse_pairs(opt.ood, '=')) {
    ood_scores.emplace_back(name, read_score_set(path));
  }
  const EvalResult result =
      evaluate(id_scores, ood_scores, opt.q, opt.fail_threshold,
               auc_pooling_from_string(opt.auc_pooling));
  const std::string json = eval_result_to_json(result);
  if (opt.out.empty()) {
    std::cout << json;
  } else {
    write_text(opt.out, json);
  }
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  std::string spec;
  std::string out;
};

SynthSpec parse_synth_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  SynthSpec spec;
  for (const auto& [key, value] : j.items()) {
    if (key == "num_classes") spec.num_classes = value.get<std::size_t>();
    else if (key == "dim") spec.dim = value.get<std::size_t>();
    else if (key == "per_class") spec.per_class = value.get<std::size_t>();
    else if (key == "separation") spec.separation = value.get<double>();
    else if (key == "within_std") spec.within_std = value.get<double>();
    else if (key == "shift") spec.shift = value.get<double>();
    else if (key == "seed") spec.seed = value.get<std::uint64_t>();
    else throw std::runtime_error(path.string() + ": unknown spec key '" + key + "'");
  }
  return spec;
}

void write_pack(const FeaturePack& pack, const std::string& stem,
                const std::string& metadata_json,
                const std::filesystem::path& dir) {
  Manifest manifest;
  manifest.features_path = stem + "_features.oodt";
  write_tensor(pack.features, dir / manifest.features_path);
  if (pack.labels) {
    manifest.labels_path = stem + "_labels.oodt";
    write_tensor(*pack.labels, dir / manifest.labels_path);
  }
  manifest.num_classes = pack.num_classes;
  manifest.role = pack.role;
  manifest.metadata_json = metadata_json;
  write_manifest(manifest, dir / (stem + ".json"));
}

void run_synth(const SynthOptions& opt) {
  const SynthSpec spec = parse_synth_spec(opt.spec);
  const SynthResult result = synth_pack(spec);
  const std::filesystem::path dir(opt.out);
  std::filesystem::create_directories(dir);
  write_pack(result.train, "train", result.metadata_json, dir);
  write_pack(result.id_test, "id_test", result.metadata_json, dir);
  write_pack(result.ood, "ood_shift", result.metadata_json, dir);
  write_tensor(result.head.weight, dir / "head_w.oodt");
  write_tensor(result.head.bias, dir / "head_b.oodt");
}

// ---------------------------------------------------------------- report

struct ReportOptions {
  std::string pool;
  std::vector<std::string> filters;
  std::vector<std::string> correlations;
  std::string group_by;
  std::string metrics;
  std::vector<std::string> scatters;
  std::string out;
};

void run_report(const ReportOptions& opt) {
  const PoolTable table = read_pool_table(opt.pool);
  ReportSpec spec;
  spec.filters = parse_pairs(opt.filters, '=');
  for (const std::string& corr : opt.correlations) {
    const auto parts = split(corr, ':');
    spec.correlations.emplace_back(parts[0], parts[1]);
  }
  if (!opt.group_by.empty()) {
    spec.group_by = split(opt.group_by, ',');
    spec.metrics = split(opt.metrics, ',');
  }
  for (const std::string& scatter : opt.scatters) {
    const auto parts = split(scatter, ':');
    spec.scatters.push_back({parts[0], parts[1], parts[2]});
  }
  if (opt.out.empty()) {
    std::cout << report_json(table, spec);
  } else {
    emit_report(table, spec, opt.out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oodkit: post-hoc out-of-distribution detection toolkit"};
  app.require_subcommand(1);

  FitOptions fit_opt;
  CLI::App* fit = app.add_subcommand(
      "fit", "Fit detector statistics on a train pack");
  fit->add_option("--train", fit_opt.train, "Train pack manifest (JSON)")
      ->required();
  fit->add_option("--head", fit_opt.head,
                  "Classifier head as 'weights.oodt,bias.oodt'")
      ->check(HeadPair);
  fit->add_option("--methods", fit_opt.methods,
                  "Methods to fit ('all' or a comma list)")
      ->check(MethodList);
  fit->add_option("--out", fit_opt.out, "Output state directory")->required();
  fit->add_option("--knn-k", fit_opt.knn_k, "KNN neighbor rank")
      ->check(CLI::PositiveNumber);
  fit->add_option("--jitter-scale", fit_opt.jitter_scale,
                  "Covariance jitter scale")
      ->check(CLI::PositiveNumber);
  fit->add_option("--kl-group-by", fit_opt.kl_group_by,
                  "KL template grouping: by predicted class or labels")
      ->check(CLI::IsMember({"predicted", "labels"}));
  fit->callback([&] { run_fit(fit_opt); });

  ScoreOptions score_opt;
  CLI::App* score =
      app.add_subcommand("score", "Score a pack with one method");
  score->add_option("--state", score_opt.state, "Fitted state directory")
      ->required();
  score->add_option("--data", score_opt.data, "Pack manifest to score")
      ->required();
  score->add_option("--method", score_opt.method, "Method name")
      ->required()
      ->check(CLI::IsMember(kAllMethods));
  score->add_option("--out", score_opt.out, "Output score file (OODT)")
      ->required();
  score->add_option("--cosine-mode", score_opt.cosine_mode,
                    "Cosine similarity mode")
      ->check(CLI::IsMember({"normalized", "verbatim"}));
  score->callback([&] { run_score(score_opt); });

  EvalOptions eval_opt;
  CLI::App* eval = app.add_subcommand(
      "eval", "Evaluate ID vs OOD score sets (FPR@TPR, AUROC)");
  eval->add_option("--id", eval_opt.id, "ID score set")->required();
  eval->add_option("--ood", eval_opt.ood,
                   "OOD score sets as name=path[,name=path...]")
      ->required()
      ->check(PairList);
  eval->add_option("--q", eval_opt.q, "Target TPR")->check(OpenUnitInterval);
  eval->add_option("--fail-threshold", eval_opt.fail_threshold,
                   "Unit-test failure FPR boundary")
      ->check(CLI::Range(0.0, 1.0));
  eval->add_option("--auc-pooling", eval_opt.auc_pooling,
                   "AUROC aggregation across OOD classes")
      ->check(CLI::IsMember({"per_class", "pooled"}));
  eval->add_option("--out", eval_opt.out,
                   "Output JSON path (stdout when omitted)");
  eval->callback([&] { run_eval(eval_opt); });

  SynthOptions synth_opt;
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a synthetic train/id-test/ood dataset");
  synth->add_option("--spec", synth_opt.spec, "Generator spec (JSON)")
      ->required();
  synth->add_option("--out", synth_opt.out, "Output directory")->required();
  synth->callback([&] { run_synth(synth_opt); });

  ReportOptions report_opt;
  CLI::App* report = app.add_subcommand(
      "report", "Analyze a model-pool results table");
  report->add_option("--pool", report_opt.pool, "Pool table (CSV)")->required();
  report->add_option("--filter", report_opt.filters,
                     "Row filters, column=value[,column=value...]")
      ->check(PairList);
  report->add_option("--corr", report_opt.correlations,
                     "Kendall tau-b correlation pair x:y")
      ->check(ColonPair);
  CLI::Option* group_by = report->add_option(
      "--group-by", report_opt.group_by, "Group-by columns (comma list)");
  CLI::Option* metrics = report->add_option(
      "--metrics", report_opt.metrics, "Metric columns to summarize");
  group_by->needs(metrics);
  metrics->needs(group_by);
  CLI::Option* scatter = report->add_option(
      "--scatter", report_opt.scatters, "Scatter series spec x:y:key");
  scatter->check(ColonTriple);
  CLI::Option* out =
      report->add_option("--out", report_opt.out, "Output directory");
  scatter->needs(out);
  report->callback([&] { run_report(report_opt); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
