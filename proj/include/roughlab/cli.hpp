#ifndef ROUGHLAB_CLI_HPP
#define ROUGHLAB_CLI_HPP

#include <string>
#include <vector>

namespace roughlab::cli {

/// Runs one CLI invocation. Exit code 0 on success, 1 on usage or validation
/// errors, 2 when an in-run assertion fails.
int run(const std::vector<std::string>& args);

int run(int argc, const char* const* argv);

}  // namespace roughlab::cli

#endif  // ROUGHLAB_CLI_HPP
