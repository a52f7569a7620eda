// Copyright 2026 The jchaos Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace jchaos {

//! Base of every error raised by the library. The CLI maps the concrete
//! subclasses onto process exit codes (see tools/jchaos.cpp).
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//! Malformed or inconsistent caller input (bad index, size mismatch, ...).
class InputError : public Error {
  public:
    using Error::Error;
};

//! A numeric value outside its admissible range, e.g. a coupler above 1.
class RangeError : public InputError {
  public:
    using InputError::InputError;
};

//! Unparseable text in one of the on-disk formats.
class ParseError : public InputError {
  public:
    using InputError::InputError;
};

//! Configuration rejected before any work was done.
class ValidationError : public InputError {
  public:
    using InputError::InputError;
};

//! The requested operation is not defined for this graph/code combination.
class UnsupportedError : public InputError {
  public:
    using InputError::InputError;
};

//! A computation would exceed its memory or size budget.
class ResourceError : public Error {
  public:
    using Error::Error;
};

//! A prerequisite artifact (certificate, instance file) is missing.
class DependencyError : public Error {
  public:
    using Error::Error;
};

//! Curve fitting failed to produce a usable optimum.
class FitError : public Error {
  public:
    using Error::Error;
};

}  // namespace jchaos
