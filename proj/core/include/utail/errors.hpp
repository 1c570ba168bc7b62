// errors.hpp
//
// Error taxonomy for the utail library. Every precondition failure throws a
// utail::error tagged with a kind; the CLI maps config errors to exit code 2
// and everything else to exit code 3.

#pragma once

#include <stdexcept>
#include <string>

namespace utail {

enum class errc {
  domain,       // parameter outside its mathematical domain
  arity,        // wrong number of kernel arguments
  size,         // sample too small (n < m, empty sample, ...)
  regime,       // request outside a validity regime (overflow guards, R < 1)
  unsupported,  // (kernel, model) or mode pair not supported
  config,       // config file parse or validation failure
};

class error : public std::runtime_error {
 public:
  error(errc kind, const std::string& what_arg)
      : std::runtime_error(what_arg), kind_(kind) {}
  errc kind() const noexcept { return kind_; }

 private:
  errc kind_;
};

[[noreturn]] inline void throw_domain(const std::string& msg) {
  throw error(errc::domain, msg);
}
[[noreturn]] inline void throw_arity(const std::string& msg) {
  throw error(errc::arity, msg);
}
[[noreturn]] inline void throw_size(const std::string& msg) {
  throw error(errc::size, msg);
}
[[noreturn]] inline void throw_regime(const std::string& msg) {
  throw error(errc::regime, msg);
}
[[noreturn]] inline void throw_unsupported(const std::string& msg) {
  throw error(errc::unsupported, msg);
}
[[noreturn]] inline void throw_config(const std::string& msg) {
  throw error(errc::config, msg);
}

}  // namespace utail
