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

#ifndef OODKIT_PARALLEL_HPP_
#define OODKIT_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace oodkit {

/// Worker count derived from OODKIT_THREADS (0 or unset = hardware auto).
std::size_t thread_budget();

/// Runs body(i) for i in [0, n) split across threads. Each index is visited
/// exactly once, so bodies that only write slot i produce output independent
/// of the partitioning. Exceptions from workers are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace oodkit

#endif  // OODKIT_PARALLEL_HPP_
