#ifndef LUPI_TOOLS_CLI_HPP_
#define LUPI_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace lupi {

/**
 * Command-line front end. `args` excludes the program name and starts with
 * the subcommand. Tabular output goes to `out` as CSV; diagnostics and
 * `--check` reports go to `err`. Returns the process exit code.
 *
 * Every subcommand accepts `--config FILE` with key=value lines; keys are the
 * long option names and explicit flags take precedence. For `experiment` the
 * keys are the experiment configuration keys instead.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lupi

#endif  // LUPI_TOOLS_CLI_HPP_
