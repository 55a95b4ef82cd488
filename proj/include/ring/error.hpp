/* Copyright 2026 The RING Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>

namespace ring {

// Error categories shared by the C++ core and the C API status codes.
enum class ErrorCode {
  kInvalidArgument = 1,
  kIo,
  kFormat,        // bad magic or unsupported version
  kChecksum,
  kInvariant,     // stored data violates a documented invariant
  kShapeMismatch,
  kNonFinite,
  kDiverged,
  kUnstable,      // spring-damper integration left the stable region
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace ring
