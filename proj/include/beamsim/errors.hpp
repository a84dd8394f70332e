#pragma once

#include <stdexcept>
#include <string>

namespace beamsim {

// Bad values in a config file or an ill-formed experiment description.
// Raised at load time, before any simulation work starts.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Optimization diverged (non-finite loss). Carries the epoch in the message.
struct TrainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace beamsim
