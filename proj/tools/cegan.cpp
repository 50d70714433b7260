#include <iostream>

#include "cegan/cli/commands.hpp"

int main(int argc, char** argv) { return cegan::run_cli(argc, argv, std::cout, std::cerr); }
