#pragma once

#include <string>
#include <utility>
#include <vector>

namespace rotmul {

/// Flat "key = value" configuration. Blank lines and lines starting with '#'
/// or ';' are ignored; underscores in keys are read as hyphens so both
/// t_final and t-final name the --t-final flag.
using FlatConfig = std::vector<std::pair<std::string, std::string>>;

/// Throws InputError on a line without '=' or with an empty key.
FlatConfig parse_flat_config(const std::string& text);
FlatConfig load_flat_config(const std::string& path);

/// Splices config entries into a command line as "--key value" pairs placed
/// right after the subcommand, skipping keys already given on the command
/// line, so explicit flags win. args[0] is the program, args[1] the
/// subcommand. Keys listed in `switches` are valueless flags and expect a
/// boolean value in the file.
std::vector<std::string> merge_config_args(const std::vector<std::string>& args, const FlatConfig& config,
                                           const std::vector<std::string>& switches = {});

}  // namespace rotmul
