// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace sepred {

/// Base class for all library errors. The CLI maps subclasses onto its
/// exit-code contract: validation/contract failures exit 1, I/O exits 2.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Tensor dimension disagreement.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// Violated operation precondition (empty batch, missing class, ...).
class ContractError : public Error {
public:
  using Error::Error;
};

/// Invalid run or model configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Malformed cell, label, or document content.
class ParseError : public Error {
public:
  using Error::Error;
};

/// Header or document structure does not match the expected schema.
class SchemaError : public Error {
public:
  using Error::Error;
};

/// File system failure (open, read, write).
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace sepred
