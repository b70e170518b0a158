// Copyright 2026 The aeclab Authors.
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

#ifndef AECLAB_ERROR_H_
#define AECLAB_ERROR_H_

#include <stdexcept>
#include <string>

namespace aeclab {

// Bad data or a violated precondition. The CLI maps it to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed command line or config. The CLI maps it to exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace aeclab

#endif  // AECLAB_ERROR_H_
