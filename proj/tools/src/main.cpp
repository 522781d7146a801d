#include <iostream>

#include "roa_cli/commands.hpp"

int main(int argc, char** argv) { return roa::cli::run(argc, argv, std::cout, std::cerr); }
