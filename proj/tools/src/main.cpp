#include <iostream>

#include "schurlr_cli/cli.hpp"

int main(int argc, char** argv) { return schurlr::cli::main_entry(argc, argv, std::cout, std::cerr); }
