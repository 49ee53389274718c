//
// Copyright 2026 The hurisk Authors
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
//

#pragma once

#include <stdexcept>
#include <string>

namespace hurisk {

/// Base class for every error raised by the library. The category maps onto
/// the CLI exit codes.
class Error : public std::runtime_error {
 public:
  enum class Category { config = 2, data = 3, fit = 4, simulation = 5 };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  [[nodiscard]] Category category() const noexcept { return category_; }
  [[nodiscard]] int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  Category category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Category::config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(Category::data, what) {}
};

/// Malformed HURDAT2 input. Carries the 1-based line number.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class FitError : public Error {
 public:
  explicit FitError(const std::string& what) : Error(Category::fit, what) {}
};

class DegenerateDataError : public FitError {
 public:
  explicit DegenerateDataError(const std::string& what) : FitError(what) {}
};

class SimulationError : public Error {
 public:
  explicit SimulationError(const std::string& what) : Error(Category::simulation, what) {}
};

}  // namespace hurisk
