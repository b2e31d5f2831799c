/*
 * snakuscule - swarms of concentric active contours for blob localization
 *
 * Copyright 2026 The snakuscule authors
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

#ifndef SNK_ERROR_HPP
#define SNK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace snk {

/// Error categories. The numeric values double as CLI exit codes.
enum class ErrorKind : int {
  Config = 2,
  Io = 3,
  Internal = 4,
  EmptyDomain = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_config(const std::string& msg) {
  throw Error(ErrorKind::Config, msg);
}

[[noreturn]] inline void throw_io(const std::string& msg) {
  throw Error(ErrorKind::Io, msg);
}

/// Raised by the energy evaluation when a contour is unusable at its current
/// pose: footprint outside the image, extent below the minimum, or a radius
/// too small for the ramp widths of its profile.
class DegenerateContour : public Error {
 public:
  explicit DegenerateContour(const std::string& what)
      : Error(ErrorKind::Internal, what) {}
};

}  // namespace snk

#endif  // SNK_ERROR_HPP
