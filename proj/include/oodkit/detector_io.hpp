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

#ifndef OODKIT_DETECTOR_IO_HPP_
#define OODKIT_DETECTOR_IO_HPP_

#include <filesystem>

#include "oodkit/detector.hpp"

namespace oodkit {

// On-disk layout: `<dir>/state.json` (scalars, counts, provenance, config)
// plus one OODT f64 tensor per fitted matrix/vector (head_w.oodt,
// gaussian_class_means.oodt, knn_train.oodt, ...). Matrices round-trip
// bit-exactly; save(load(dir)) reproduces the directory byte for byte.
void save_state(const DetectorState& state, const std::filesystem::path& dir);
DetectorState load_state(const std::filesystem::path& dir);

}  // namespace oodkit

#endif  // OODKIT_DETECTOR_IO_HPP_
