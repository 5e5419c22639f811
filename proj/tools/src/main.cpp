#include <iostream>

#include "pdbc/cli.hpp"

int main(int argc, char** argv) { return pdbc::cli::run(argc, argv, std::cout, std::cerr); }
