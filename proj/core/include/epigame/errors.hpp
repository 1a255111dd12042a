#pragma once

#include <stdexcept>
#include <string>

namespace epigame {

// Failure categories surfaced by the library. The CLI maps them onto
// stable exit codes (config -> 2, size caps -> 3, model preconditions -> 4).
enum class Errc {
    DisconnectedFromSource,
    DuplicateEdge,
    SelfLoop,
    NotAnEdge,
    TooLarge,
    InvalidOverride,
    InvalidReduction,
    NoBite,
    RatioTooSmall,
    UnpunishableNode,
    NotCoordinated,
    InvalidConfig,
    InvalidArgument,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace epigame
