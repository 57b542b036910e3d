// Copyright 2026 The mscaec Authors.
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

#ifndef MSCAEC_STATUS_H_
#define MSCAEC_STATUS_H_

#include <stdexcept>
#include <string>

namespace mscaec {

// Base class of every error raised by the library. The kind string is stable
// and is what the command-line tool prints in its error records.
class Error : public std::runtime_error {
 public:
  Error(const char* kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  const char* kind() const { return kind_; }

 private:
  const char* kind_;
};

// Shapes or layer parameters that do not compose.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

// A caller passed a value outside the documented domain.
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error("argument", what) {}
};

// Entropy coding failed: symbol outside the alphabet, exhausted or corrupt
// stream.
class CodingError : public Error {
 public:
  explicit CodingError(const std::string& what) : Error("coding", what) {}
};

// Malformed file or container.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("parse", what) {}
};

// A self-check inside the library failed.
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what) : Error("internal", what) {}
};

}  // namespace mscaec

#endif  // MSCAEC_STATUS_H_
