#pragma once

#include <stdexcept>
#include <string>

namespace d2dsim {

// Invalid configuration value or file (caught before slot 0).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Out-of-range argument to a numeric operation.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cross-referenced data structures disagree (e.g. trace references a
// packet index absent from the packet map).
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Events fed to a state machine in an illegal order.
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace d2dsim
