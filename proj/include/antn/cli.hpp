#pragma once

namespace antn::cli {

/// Entry point for the command-line tool; returns the process exit code
/// (0 ok, 2 bad configuration, 3 numerical failure, 4 I/O failure).
int run(int argc, char** argv);

}  // namespace antn::cli
