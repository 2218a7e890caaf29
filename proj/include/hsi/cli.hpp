#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hsi {

/// Parses and runs one subcommand (synth, split, train, eval, classify,
/// ndvi, interpret). `args` excludes the program name. Returns the process
/// exit code; failures print a one-line diagnostic to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

} // namespace hsi
