#ifndef G3_CLI_HPP
#define G3_CLI_HPP

/// \file cli.hpp
/// Entry point of the `g3` command-line tool; implemented in src/cli.cpp.

namespace g3
{

  /// Parse arguments, run the selected command and return the process exit
  /// code: 0 when every check passes, 1 on a check failure or a propagated
  /// computation error, 2 on a configuration or usage error.
  int run_cli(int argc, char ** argv);

} // namespace g3

#endif
