#pragma once

namespace tflow {

/// Command-line entry point (subcommands run, check, convergence,
/// cascade); returns the process exit code.
int cli_main(int argc, char** argv);

}  // namespace tflow
