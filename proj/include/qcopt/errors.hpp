#pragma once

#include <stdexcept>
#include <string>

namespace qcopt {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input text (QASM, angle expressions). Carries a 1-based line number.
struct ParseError : Error {
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line(line) {}
    int line;
};

/// File-level failures: missing files, bad magic, version or CRC mismatch.
struct IoError : Error {
    using Error::Error;
};

/// Invalid configuration detected before work starts.
struct ConfigError : Error {
    using Error::Error;
};

/// Request exceeds a hard resource cap (e.g. dense unitary above the qubit cap).
struct ResourceError : Error {
    using Error::Error;
};

}  // namespace qcopt
