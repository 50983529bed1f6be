/*
 * Copyright 2026 The kcgflr Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kcgflr {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A configuration value is out of range. `field()` names the offending parameter.
class InvalidConfig : public Error {
public:
    InvalidConfig(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

/// Matrix failed the symmetry or positive-semidefiniteness contract.
class ContractViolation : public Error {
public:
    using Error::Error;
};

class PsdViolation : public ContractViolation {
public:
    using ContractViolation::ContractViolation;
};

class WrongPath : public Error {
public:
    using Error::Error;
};

class DegenerateDirection : public Error {
public:
    using Error::Error;
};

/// NaN/Inf or a failed factorization. Carries the iteration it happened at.
class NumericalFailure : public Error {
public:
    NumericalFailure(const std::string& what, std::size_t iteration)
        : Error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace kcgflr
