#pragma once

#include <stdexcept>
#include <string>

namespace neurite {

/// Base error type for all library failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Soma extraction found no surviving blob. Callers may proceed soma-less
/// for pure-skeleton inputs.
class SomaNotFound : public Error {
public:
    SomaNotFound() : Error("no soma found") {}
};

}  // namespace neurite
