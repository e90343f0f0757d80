// Copyright 2026 The DRPO Authors.
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

#ifndef DRPO_METHOD_H_
#define DRPO_METHOD_H_

#include <string>
#include <string_view>

#include "drpo/rpo.h"

namespace drpo {

enum class Method { kRpoMax, kRpoMean, kDeepSvdd, kDeepRpoMax, kDeepRpoMean };

Method parse_method(std::string_view name);
std::string_view to_string(Method method);

inline bool is_deep(Method m) { return m != Method::kRpoMax && m != Method::kRpoMean; }
inline bool uses_projections(Method m) { return m != Method::kDeepSvdd; }
inline Estimator estimator_of(Method m) {
  return (m == Method::kRpoMax || m == Method::kDeepRpoMax) ? Estimator::kMax
                                                            : Estimator::kMean;
}

}  // namespace drpo

#endif  // DRPO_METHOD_H_
