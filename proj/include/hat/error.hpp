#pragma once

#include <stdexcept>
#include <string>

namespace hat {

enum class ErrorKind {
    Parse,        // malformed text, unknown token
    Fragment,     // formula outside the fragment a compiler accepts
    Resource,     // configured cap exceeded (width, value sets, enumeration budget)
    Dimension,    // ill-typed vectors or layers
    Domain,       // argument outside an operation's domain
    Unsupported,  // model feature an operation cannot handle (e.g. AHA in circuit extraction)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace hat
