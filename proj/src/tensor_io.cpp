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

#include "oodkit/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace oodkit {

namespace {

constexpr char kMagic[4] = {'O', 'O', 'D', 'T'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "OODT writer assumes a little-endian host");

template <typename T>
void append_le(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T read_le(const std::string& bytes, std::size_t& offset) {
  if (offset + sizeof(T) > bytes.size()) {
    throw std::runtime_error("OODT data truncated in header");
  }
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  offset += sizeof(T);
  return value;
}

}  // namespace

std::string tensor_to_bytes(const Tensor& t) {
  std::string out;
  out.reserve(26 + t.byte_size());
  out.append(kMagic, sizeof(kMagic));
  append_le(out, kVersion);
  out.push_back(static_cast<char>(t.dtype()));
  if (t.rank() > 255) throw std::invalid_argument("tensor rank exceeds 255");
  out.push_back(static_cast<char>(t.rank()));
  for (std::size_t extent : t.shape()) {
    append_le(out, static_cast<std::uint64_t>(extent));
  }
  out.append(reinterpret_cast<const char*>(t.raw_data()), t.byte_size());
  return out;
}

std::size_t write_tensor(const Tensor& t, const std::filesystem::path& destination) {
  const std::string bytes = tensor_to_bytes(t);
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + destination.string() +
                             "' for writing");
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) {
    throw std::runtime_error("write failed for '" + destination.string() + "'");
  }
  return bytes.size();
}

Tensor tensor_from_bytes(const std::string& bytes, bool permissive) {
  std::size_t offset = 0;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw std::runtime_error("bad magic: not an OODT tensor");
  }
  offset = 4;
  const auto version = read_le<std::uint32_t>(bytes, offset);
  if (version != kVersion) {
    throw std::runtime_error("unsupported OODT version " + std::to_string(version));
  }
  const auto dtype_code = read_le<std::uint8_t>(bytes, offset);
  if (dtype_code < 1 || dtype_code > 3) {
    throw std::runtime_error("unknown OODT dtype code " + std::to_string(dtype_code));
  }
  const auto dtype = static_cast<Dtype>(dtype_code);
  const auto rank = read_le<std::uint8_t>(bytes, offset);
  std::vector<std::size_t> shape(rank);
  for (auto& extent : shape) {
    extent = static_cast<std::size_t>(read_le<std::uint64_t>(bytes, offset));
  }

  const std::size_t count = shape_element_count(shape);
  const std::size_t payload = count * dtype_size(dtype);
  if (bytes.size() - offset < payload) {
    throw std::runtime_error(
        "OODT payload truncated: header declares " + std::to_string(count) +
        " elements (" + std::to_string(payload) + " bytes) but only " +
        std::to_string(bytes.size() - offset) + " remain");
  }
  if (bytes.size() - offset > payload) {
    throw std::runtime_error("OODT file has trailing bytes after the payload");
  }

  Tensor t = Tensor::zeros(dtype, shape);
  if (payload > 0) {
    std::memcpy(const_cast<std::byte*>(t.raw_data()), bytes.data() + offset, payload);
  }
  if (!permissive) {
    if (std::size_t i = t.first_non_finite(); i != Tensor::npos) {
      throw std::runtime_error("non-finite value at flat index " +
                               std::to_string(i) +
                               " (pass permissive to allow)");
    }
  }
  return t;
}

Tensor read_tensor(const std::filesystem::path& source, bool permissive) {
  std::ifstream in(source, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + source.string() + "' for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return tensor_from_bytes(buffer.str(), permissive);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(source.string() + ": " + e.what());
  }
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  return p.is_absolute() ? p : base / p;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
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
  return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

LoadedPack read_manifest(const std::filesystem::path& path) {
  const nlohmann::json j = read_json_file(path);
  if (!j.is_object()) {
    throw std::runtime_error(path.string() + ": manifest must be a JSON object");
  }
  for (const char* field : {"features", "num_classes", "role"}) {
    if (!j.contains(field)) {
      throw std::runtime_error(path.string() + ": manifest missing field '" +
                               field + "'");
    }
  }

  Manifest m;
  m.features_path = j.at("features").get<std::string>();
  if (j.contains("logits") && !j.at("logits").is_null()) {
    m.logits_path = j.at("logits").get<std::string>();
  }
  if (j.contains("labels") && !j.at("labels").is_null()) {
    m.labels_path = j.at("labels").get<std::string>();
  }
  m.num_classes = j.at("num_classes").get<std::size_t>();
  m.role = Role::parse(j.at("role").get<std::string>());
  m.metadata_json = j.contains("metadata") ? j.at("metadata").dump() : "{}";

  const std::filesystem::path base = path.parent_path();
  FeaturePack pack;
  pack.features = read_tensor(resolve(base, m.features_path));
  if (!m.logits_path.empty()) {
    pack.logits = read_tensor(resolve(base, m.logits_path));
  }
  if (!m.labels_path.empty()) {
    pack.labels = read_tensor(resolve(base, m.labels_path));
  }
  pack.num_classes = m.num_classes;
  pack.role = m.role;

  const ValidationReport report = validate_pack(pack);
  if (!report.ok) {
    throw std::runtime_error(path.string() + ": " + report.violations.front());
  }
  return {std::move(m), std::move(pack)};
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  nlohmann::json j;
  j["features"] = manifest.features_path.string();
  if (!manifest.logits_path.empty()) j["logits"] = manifest.logits_path.string();
  if (!manifest.labels_path.empty()) j["labels"] = manifest.labels_path.string();
  j["num_classes"] = manifest.num_classes;
  j["role"] = manifest.role.str();
  j["metadata"] = nlohmann::json::parse(manifest.metadata_json);
  write_text_file(path, j.dump(2) + "\n");
}

void write_score_set(const ScoreSet& scores, const std::filesystem::path& path) {
  write_tensor(Tensor::from_f64({scores.values.size()}, scores.values), path);
  nlohmann::json sidecar;
  sidecar["method"] = scores.method;
  sidecar["source_role"] = scores.source_role.str();
  sidecar["state_hash"] = scores.state_hash;
  write_text_file(path.string() + ".json", sidecar.dump(2) + "\n");
}

ScoreSet read_score_set(const std::filesystem::path& path) {
  const Tensor t = read_tensor(path);
  if (t.rank() != 1 || t.dtype() != Dtype::f64) {
    throw std::runtime_error(path.string() +
                             ": score set must be a rank-1 f64 tensor");
  }
  const nlohmann::json sidecar = read_json_file(path.string() + ".json");
  ScoreSet scores;
  const auto data = t.f64();
  scores.values.assign(data.begin(), data.end());
  scores.method = sidecar.at("method").get<std::string>();
  scores.source_role = Role::parse(sidecar.at("source_role").get<std::string>());
  scores.state_hash = sidecar.at("state_hash").get<std::string>();
  return scores;
}

}  // namespace oodkit
