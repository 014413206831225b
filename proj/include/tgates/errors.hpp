// Copyright 2026 The tgates Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tgates {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
  public:
    using Error::Error;
};

class OutOfRange : public Error {
  public:
    using Error::Error;
};

/// Malformed input file. Row and column are 1-based; 0 means "not applicable".
class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : Error(format(what, row, column)), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

  private:
    static std::string format(const std::string& what, std::size_t row, std::size_t column) {
        std::string msg = what;
        if (row > 0) {
            msg += " (row " + std::to_string(row);
            if (column > 0) msg += ", column " + std::to_string(column);
            msg += ")";
        }
        return msg;
    }

    std::size_t row_;
    std::size_t column_;
};

class SynthesisError : public Error {
  public:
    SynthesisError(const std::string& what, std::size_t timestep)
        : Error(what + " at timestep " + std::to_string(timestep)), timestep_(timestep) {}
    std::size_t timestep() const noexcept { return timestep_; }

  private:
    std::size_t timestep_;
};

class TrackingError : public Error {
  public:
    TrackingError(const std::string& what, std::size_t timestep)
        : Error(what + " at timestep " + std::to_string(timestep)), timestep_(timestep) {}
    std::size_t timestep() const noexcept { return timestep_; }

  private:
    std::size_t timestep_;
};

class EscapeError : public Error {
  public:
    EscapeError(const std::string& what, double time)
        : Error(what + " at t = " + std::to_string(time) + " s"), time_(time) {}
    double time() const noexcept { return time_; }

  private:
    double time_;
};

class SequenceError : public Error {
  public:
    SequenceError(const std::string& what, std::size_t element)
        : Error("element " + std::to_string(element) + ": " + what), element_(element) {}
    std::size_t element() const noexcept { return element_; }

  private:
    std::size_t element_;
};

class BracketError : public Error {
  public:
    BracketError(const std::string& what, double value_lo, double value_hi)
        : Error(what + " (f(lo) = " + std::to_string(value_lo) +
                ", f(hi) = " + std::to_string(value_hi) + ")"),
          value_lo_(value_lo), value_hi_(value_hi) {}
    double value_lo() const noexcept { return value_lo_; }
    double value_hi() const noexcept { return value_hi_; }

  private:
    double value_lo_;
    double value_hi_;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace tgates
