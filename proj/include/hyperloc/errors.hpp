#pragma once

#include <stdexcept>

namespace hyperloc {

// File missing / unreadable / unwritable.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally broken input data (bad record, bad header, version mismatch).
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Semantically invalid configuration or arguments (unknown source tag,
// out-of-range parameter, empty training corpus).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hyperloc
