#include <iostream>

#include "structprobe/cli/cli.hpp"

int main(int argc, char** argv) { return structprobe::cli::run_cli(argc, argv, std::cout, std::cerr); }
