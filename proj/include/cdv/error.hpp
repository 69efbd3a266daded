#pragma once

#include <stdexcept>
#include <string>

namespace cdv {

// Every failure raised by the library carries the name of the module that
// raised it, so the CLI can surface "[transport] ..." style messages.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error("[" + module + "] " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

}  // namespace cdv
