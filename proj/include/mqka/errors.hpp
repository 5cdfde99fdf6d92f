#pragma once

#include <stdexcept>
#include <string>

namespace mqka {

// Invalid or inconsistent configuration; raised before any randomness is drawn.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A protocol step was invoked out of order.
class ProtocolOrderError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A hop hook reported channel loss. Not a detection event.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mqka
