/*
 * Copyright 2026 The colstore Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include <vector>

#include "colstore/schema.hpp"

namespace colstore::testing_schemas {

// id + collection of particles, each with an energy and a collection of ids.
inline std::vector<FieldSpec> event_schema() {
  return {
      FieldSpec::of<std::int32_t>("id"),
      FieldSpec::collection("particles",
                            FieldSpec::record("particle", {FieldSpec::of<float>("energy"),
                                                           FieldSpec::collection("ids", FieldSpec::of<std::int32_t>("id"))})),
  };
}

}  // namespace colstore::testing_schemas
