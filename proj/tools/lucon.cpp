#include <iostream>

#include "lucon/cli.hpp"

int main(int argc, char** argv) { return lucon::cli::run(argc, argv, std::cout, std::cerr); }
