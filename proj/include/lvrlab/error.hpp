#pragma once

#include <stdexcept>
#include <string>

namespace lvrlab {

// Invalid configuration value; `key` names the offending field.
class config_error : public std::runtime_error {
public:
  config_error(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

class argument_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// A hook was invoked out of order (after_swap without a matching before_swap).
class protocol_error : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// A same-block swap whose output is not covered by the hedge budget.
class swap_rejected : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Hedger withdrawal larger than the available budget.
class withdrawal_rejected : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A non-finite value surfaced in a result.
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace lvrlab
