// Copyright 2026 The oamqkd Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oamqkd {

using complex_t = std::complex<double>;
using cvector_t = std::vector<complex_t>;
using rvector_t = std::vector<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ErrorKind {
  IndexOutOfRange,
  DimensionMismatch,
  UnsupportedDimension,
  WrongFrame,
  GridTooCoarse,
  ConfigInvalid,
  ParseError,
  ValidationError,
  IoError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
  case ErrorKind::DimensionMismatch: return "DimensionMismatch";
  case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
  case ErrorKind::WrongFrame: return "WrongFrame";
  case ErrorKind::GridTooCoarse: return "GridTooCoarse";
  case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  case ErrorKind::ParseError: return "ParseError";
  case ErrorKind::ValidationError: return "ValidationError";
  case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

// All library failures are reported through this exception; kind() lets
// callers branch without parsing the message.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  // The message without the kind prefix.
  const std::string &message() const noexcept { return message_; }

private:
  ErrorKind kind_;
  std::string message_;
};

// e^{i theta}
inline complex_t phase(double theta) {
  return {std::cos(theta), std::sin(theta)};
}

inline bool is_power_of_two(std::size_t d) {
  return d >= 1 && (d & (d - 1)) == 0;
}

inline bool is_prime(std::size_t d) {
  if (d < 2)
    return false;
  for (std::size_t p = 2; p * p <= d; ++p)
    if (d % p == 0)
      return false;
  return true;
}

} // namespace oamqkd
