#pragma once

#include <stdexcept>
#include <string>

namespace scg {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration, CLI usage, or violated preconditions.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input files or LLM responses that cannot be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

/// LLM backend failures: network/auth errors, cassette mismatches,
/// responses that stay refused/truncated past the retry budget.
class GatewayError : public Error {
public:
    using Error::Error;
};

/// Sandbox infrastructure failures (not test failures of generated code).
class SandboxError : public Error {
public:
    using Error::Error;
};

}  // namespace scg
