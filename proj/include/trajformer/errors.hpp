// Copyright 2026 The Trajformer Authors
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

#ifndef TRAJFORMER__ERRORS_HPP_
#define TRAJFORMER__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace trajformer
{

/// Shape or width mismatch between operands.
class DimensionError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// A NaN or Inf appeared where a finite value is required.
class NumericError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Caller violated an operation precondition (wrong arity, consumed tape, ...).
class ContractError : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

/// Bad hyperparameters or dataset-generation settings.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent file content. The message names the field.
class FormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace trajformer

#endif  // TRAJFORMER__ERRORS_HPP_
