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

#ifndef OODKIT_TENSOR_IO_HPP_
#define OODKIT_TENSOR_IO_HPP_

#include <filesystem>
#include <string>

#include "oodkit/data_model.hpp"
#include "oodkit/tensor.hpp"

namespace oodkit {

// OODT binary tensor format, version 1:
//   magic   "OODT"                     4 bytes
//   version u32 little-endian = 1      4 bytes
//   dtype   u8 (1=f32, 2=f64, 3=i32)   1 byte
//   rank    u8                         1 byte
//   extents rank x u64 little-endian
//   data    tightly packed row-major little-endian values
// See FORMATS.md for the normative description.

/// Serializes to the OODT byte layout.
std::string tensor_to_bytes(const Tensor& t);

/// Writes the OODT file; returns the byte count written.
std::size_t write_tensor(const Tensor& t, const std::filesystem::path& destination);

/// Parses OODT bytes. Rejects non-finite floating values unless permissive.
Tensor tensor_from_bytes(const std::string& bytes, bool permissive = false);

Tensor read_tensor(const std::filesystem::path& source, bool permissive = false);

/// Dataset manifest: where a pack's tensors live plus free-form metadata.
/// Tensor paths are resolved relative to the manifest file's directory.
struct Manifest {
  std::filesystem::path features_path;
  std::filesystem::path logits_path;  // empty when absent
  std::filesystem::path labels_path;  // empty when absent
  std::size_t num_classes = 0;
  Role role;
  std::string metadata_json = "{}";  // metadata object, serialized
};

struct LoadedPack {
  Manifest manifest;
  FeaturePack pack;
};

/// Loads manifest + tensors and validates the resulting pack; throws with
/// the first violation message when validation fails.
LoadedPack read_manifest(const std::filesystem::path& path);

/// Writes a manifest describing already-written tensor files. Paths are
/// stored as given (normally relative to the manifest's directory).
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// ScoreSet on-disk form: an f64 OODT tensor at `path` plus a JSON sidecar
/// at `path + ".json"` holding method, source role, and state hash.
void write_score_set(const ScoreSet& scores, const std::filesystem::path& path);
ScoreSet read_score_set(const std::filesystem::path& path);

}  // namespace oodkit

#endif  // OODKIT_TENSOR_IO_HPP_
