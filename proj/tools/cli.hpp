#pragma once

namespace llrp {

// Entry point of the llrp command-line tool. Exit codes: 0 success,
// 1 validation failure, 2 usage error, 3 runtime error.
int cli_main(int argc, char** argv);

}  // namespace llrp
