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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eqk {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent dataset content. `line` is 1-based, 0 when the
// error is not tied to a specific line.
class DatasetError : public Error {
 public:
  DatasetError(const std::string& message, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class AnnotationError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class SnapshotError : public Error {
 public:
  using Error::Error;
};

// A search engine call that failed after the adapter exhausted its retries.
class SearchError : public Error {
 public:
  using Error::Error;
};

// A generation backend call failed. `attempts` is the number of calls made
// before giving up.
class BackendError : public Error {
 public:
  BackendError(const std::string& message, bool retryable, int attempts = 1);
  bool retryable() const { return retryable_; }
  int attempts() const { return attempts_; }
  // The message without the attempt count.
  const std::string& detail() const { return detail_; }

 private:
  std::string detail_;
  bool retryable_;
  int attempts_;
};

}  // namespace eqk
