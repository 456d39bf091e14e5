#pragma once

#include <optional>

#include "flagdyn/errors.hpp"

namespace flagdyn::testing {

// run f, report the library error code it throws (if any)
template <typename F>
std::optional<Err> thrown(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace flagdyn::testing
