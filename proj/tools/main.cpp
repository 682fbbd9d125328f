#include "symtest/harness/cli.hpp"

int main(int argc, char** argv) { return symtest::cli_main(argc, argv); }
