#pragma once

#include <stdexcept>
#include <string>

namespace gsw {

// Error taxonomy shared across the pipeline. The CLI maps these onto process
// exit codes: input errors 2, store/state errors 3, provider errors 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: corpus/query schema violations, duplicate ids, bad arguments.
class InputError : public Error {
public:
    using Error::Error;
};

/// Configuration problems (mismatched embedding dimension, malformed config file).
class ConfigError : public InputError {
public:
    using InputError::InputError;
};

/// Store-level problems: missing or mismatched manifest, corrupt chapter files.
class StateError : public Error {
public:
    using Error::Error;
};

/// Provider-side failures that survived the retry policy, refusals, and
/// extraction output that never parsed.
class ProviderError : public Error {
public:
    using Error::Error;
};

/// Retryable transport failure. The gateway converts this into ProviderError
/// once the retry budget is exhausted.
class TransientProviderError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

/// Violation of the structured output grammar, with the offending line.
class GrammarError : public Error {
public:
    GrammarError(const std::string& message, int line)
        : Error(message + " (line " + std::to_string(line) + ")"), line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

} // namespace gsw
