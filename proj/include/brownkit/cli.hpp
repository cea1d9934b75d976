#pragma once

#include <iostream>

namespace brownkit::cli {

// Exit codes: 0 ok, 2 bad configuration, 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace brownkit::cli
