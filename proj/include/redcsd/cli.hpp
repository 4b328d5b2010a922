#pragma once

#include <iosfwd>

namespace redcsd {

inline constexpr int EXIT_OK = 0;
inline constexpr int EXIT_CONFIG = 2;      ///< bad arguments, config, or input data
inline constexpr int EXIT_IO = 3;
inline constexpr int EXIT_ESTIMATION = 4;  ///< a required estimate or analysis failed

int run_cli(int argc, char** argv);
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace redcsd
