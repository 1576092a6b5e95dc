#include "cli.hpp"

int main(int argc, char** argv) { return llrp::cli_main(argc, argv); }
