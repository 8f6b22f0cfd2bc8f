#pragma once

#include <stdexcept>
#include <string>

namespace crt {

/// Base of all library errors. `code()` is a stable machine-readable tag
/// used by the CLI for its JSON error output.
class CrtError : public std::runtime_error {
public:
    CrtError(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct NoIntersection : CrtError {
    explicit NoIntersection(const std::string& msg) : CrtError("NoIntersection", msg) {}
};

struct ZeroDirection : CrtError {
    explicit ZeroDirection(const std::string& msg) : CrtError("ZeroDirection", msg) {}
};

struct InsufficientGrid : CrtError {
    explicit InsufficientGrid(const std::string& msg) : CrtError("InsufficientGrid", msg) {}
};

struct InsufficientDerivOrder : CrtError {
    explicit InsufficientDerivOrder(const std::string& msg) : CrtError("InsufficientDerivOrder", msg) {}
};

struct OutOfRange : CrtError {
    explicit OutOfRange(const std::string& msg) : CrtError("OutOfRange", msg) {}
};

struct BadMagic : CrtError {
    explicit BadMagic(const std::string& msg) : CrtError("BadMagic", msg) {}
};

struct CrcMismatch : CrtError {
    explicit CrcMismatch(const std::string& msg) : CrtError("CrcMismatch", msg) {}
};

struct SchemaMismatch : CrtError {
    explicit SchemaMismatch(const std::string& msg) : CrtError("SchemaMismatch", msg) {}
};

struct SpecMismatch : CrtError {
    explicit SpecMismatch(const std::string& msg) : CrtError("SpecMismatch", msg) {}
};

} // namespace crt
