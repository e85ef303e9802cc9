#include <iostream>

#include "kerrsim/cli.hpp"

int main(int argc, char** argv) { return kerrsim::cli::main(argc, argv, std::cout, std::cerr); }
