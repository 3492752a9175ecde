#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace delsearch {

// Broad categories double as CLI exit codes; `tag` is the stable
// machine-readable error name surfaced in diagnostics.
enum class Errc {
  config = 2,
  cap_exceeded = 3,
  model_violation = 4,
  no_pure_equilibrium = 5,
};

class Error : public std::runtime_error {
 public:
  Error(Errc category, std::string tag, std::string message)
      : std::runtime_error(tag + ": " + message),
        category_(category),
        tag_(std::move(tag)),
        message_(std::move(message)) {}

  Errc category() const noexcept { return category_; }
  const std::string& tag() const noexcept { return tag_; }
  const std::string& message() const noexcept { return message_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  Errc category_;
  std::string tag_;
  std::string message_;
};

[[noreturn]] inline void fail(Errc category, std::string tag, const std::string& what) {
  throw Error(category, std::move(tag), what);
}

}  // namespace delsearch
