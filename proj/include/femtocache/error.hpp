// Copyright 2026 The femtocache Authors
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

#ifndef FEMTOCACHE_ERROR_HPP_
#define FEMTOCACHE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace femtocache {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument or configuration value was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Two interference rates coincide and tie jittering is disabled.
class DegenerateRates : public Error {
 public:
  using Error::Error;
};

class EmptySample : public Error {
 public:
  using Error::Error;
};

// No file passed the alive test; the previous cache must be kept.
class EmptyAliveSet : public Error {
 public:
  using Error::Error;
};

class NoLiveArms : public Error {
 public:
  using Error::Error;
};

// Malformed or out-of-range scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace femtocache

#endif  // FEMTOCACHE_ERROR_HPP_
