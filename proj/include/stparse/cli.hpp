#pragma once
// Command-line entry point: train, infer, eval, synth, render, validate.
// Returns the process exit code (0 success, 1 validation failure, 2 usage).

namespace stparse {

int run_cli(int argc, char** argv);

}  // namespace stparse
