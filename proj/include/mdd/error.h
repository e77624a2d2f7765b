// mdd/error.h

// Copyright 2026  mfc-mdd authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MDD_ERROR_H_
#define MDD_ERROR_H_

#include <stdexcept>
#include <string>

namespace mdd {

/// Base class of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files (inventory, manifest, checkpoint, CSV).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A symbol or record that is not where the caller expected it.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Tensor shapes that do not fit a primitive.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Violated preconditions of an operation.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An oracle or enumeration asked to run on an instance that is too large.
class SizeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Non-finite values where only finite ones are allowed.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace mdd

#endif  // MDD_ERROR_H_
