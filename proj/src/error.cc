/*
 * Copyright 2026 The eqk Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "eqk/error.h"

namespace eqk {

DatasetError::DatasetError(const std::string& message, std::size_t line)
    : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
      line_(line) {}

BackendError::BackendError(const std::string& message, bool retryable,
                           int attempts)
    : Error(message + " (after " + std::to_string(attempts) +
            (attempts == 1 ? " attempt)" : " attempts)")),
      detail_(message),
      retryable_(retryable),
      attempts_(attempts) {}

}  // namespace eqk
