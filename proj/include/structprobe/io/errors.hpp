#pragma once

#include <stdexcept>

namespace structprobe::io {

/// Malformed or inconsistent input data (bad file, version mismatch, ...).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace structprobe::io
