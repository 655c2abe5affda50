#include <iostream>

#include "jcanyon/commands.hpp"

int main(int argc, char** argv) { return jcanyon::cli::run_cli(argc, argv, std::cout, std::cerr); }
