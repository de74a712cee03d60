// Copyright 2026 The noonsim Authors
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

namespace noon {

// Invalid user input: bad parameters, bad configuration, unknown labels.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Parameters that violate a design condition by more than the allowed tolerance.
class ConditionViolation : public ConfigError {
public:
    ConditionViolation(const std::string& what, double residual)
        : ConfigError(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// A numerical procedure did not reach its tolerance.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

}  // namespace noon
