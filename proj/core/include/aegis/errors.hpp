#pragma once

#include <stdexcept>
#include <string>

namespace aegis {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad configuration: unknown keys, missing paths, inconsistent settings.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// File could not be read or written.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

/// Misuse of a domain operation (empty merge list, dangling reference).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// Chat backend failed: non-2xx status, malformed payload, or transport
/// failure after all retries. status is 0 when no HTTP status applies.
class BackendError : public Error {
public:
    BackendError(const std::string& what, int status = 0, int attempts = 1)
        : Error(what), status(status), attempts(attempts) {}
    int status;
    int attempts;
};

/// Scripted backend has no (further) entry for the requested tag.
class ScriptExhaustedError : public Error {
public:
    explicit ScriptExhaustedError(const std::string& what) : Error(what) {}
};

/// Replay saw a request whose tag differs from the recorded one.
class ReplayDivergenceError : public Error {
public:
    ReplayDivergenceError(const std::string& what, std::string expected_tag,
                          std::string actual_tag)
        : Error(what),
          expected_tag(std::move(expected_tag)),
          actual_tag(std::move(actual_tag)) {}
    std::string expected_tag;
    std::string actual_tag;
};

/// Prompt rendering failed: empty requirement, missing upstream stage,
/// or a role/version without the requested instructions.
class PromptError : public Error {
public:
    explicit PromptError(const std::string& what) : Error(what) {}
};

/// Stage outputs contained no recognizable artifact tables.
class UnparsedError : public Error {
public:
    explicit UnparsedError(const std::string& what) : Error(what) {}
};

/// Judge reply did not match the constrained answer format.
class JudgeFormatError : public Error {
public:
    explicit JudgeFormatError(const std::string& what) : Error(what) {}
};

}  // namespace aegis
