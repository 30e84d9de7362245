#pragma once

#include <stdexcept>
#include <string>

namespace hommb {

/// Bad user input: malformed config, out-of-range parameters, inconsistent
/// domain setup. CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical contract was violated at runtime: non-positive Jacobian,
/// singular interpolation system, failed Newton inversion. Exit code 2.
class NumericalContractError : public std::runtime_error {
public:
  explicit NumericalContractError(const std::string& msg)
    : std::runtime_error(msg) {}
};

namespace detail {

[[noreturn]] inline void fail_require(const char* cond, const std::string& msg) {
  throw std::logic_error(std::string("requirement failed: ") + cond +
                         (msg.empty() ? "" : (": " + msg)));
}

} // namespace detail

// Internal precondition check. These guard programmer errors (bad boxes,
// centering mismatches), not user input, hence logic_error.
#define HOMMB_REQUIRE(cond, msg)                                               \
  do {                                                                         \
    if (!(cond)) ::hommb::detail::fail_require(#cond, (msg));                  \
  } while (0)

} // namespace hommb
