// Copyright 2026 The gcplan Authors
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

#ifndef GCPLAN_ERRORS_HPP_
#define GCPLAN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace gcplan {

// Base class for all library errors. Everything thrown on purpose derives
// from this so callers (and the C API shim) can distinguish our failures
// from genuine programming errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data: bad file contents, inconsistent graph topology,
// out-of-range ids. The message names the offending record or field.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// File could not be read, written, or parsed as JSON at all.
class IoError : public Error {
 public:
  using Error::Error;
};

// The navigation goal is unreachable from the query node, so the on-route
// node set would be empty. Callers decide whether to fall back or abort.
class RouteError : public Error {
 public:
  using Error::Error;
};

// An expert trajectory could not be matched to the lane graph (some
// waypoint is further than the matching threshold from every candidate
// node). The affected scenario is unusable as a training label.
class LabelingError : public Error {
 public:
  using Error::Error;
};

// A bounded enumeration exceeded its safety limit.
class GuardError : public Error {
 public:
  using Error::Error;
};

// A caller passed an argument that is structurally valid but not usable
// here (wrong model mode for a planner, negative sample counts, ...).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace gcplan

#endif  // GCPLAN_ERRORS_HPP_
