#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "covspec/error.hpp"

namespace covspec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitProtocol = 3;
inline constexpr int kExitTransport = 4;

/// Configuration problems map to 2, transport problems to 4, everything else
/// raised at runtime to 3.
int exit_code_for(Errc code) noexcept;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace covspec::cli
