// Copyright 2026 The gnslab Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace gnslab {

// Shapes of blocks, bases or tensors do not fit together.
class StructuralError : public std::invalid_argument {
 public:
  explicit StructuralError(const std::string& what)
      : std::invalid_argument("structural error: " + what) {}
};

// An argument lies outside the domain where an operation is defined.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what)
      : std::domain_error("domain error: " + what) {}
};

// A documented precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what)
      : std::invalid_argument("precondition failed: " + what) {}
};

// A product or adjoint left the span it was supposed to stay in.
class ClosureError : public std::runtime_error {
 public:
  ClosureError(const std::string& what, double residual)
      : std::runtime_error("closure error: " + what +
                           " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// A map was rejected by the GNS pipeline; `diagnosis` is user-facing.
class RejectedError : public std::runtime_error {
 public:
  explicit RejectedError(const std::string& diagnosis)
      : std::runtime_error(diagnosis) {}
};

// Something the construction proves cannot happen did happen numerically.
class InternalInconsistency : public std::logic_error {
 public:
  explicit InternalInconsistency(const std::string& what)
      : std::logic_error("internal inconsistency: " + what) {}
};

// Malformed input document.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what)
      : std::runtime_error("parse error: " + what) {}
};

}  // namespace gnslab
