#include <iostream>

#include "aldc/cli.hpp"

int main(int argc, char** argv) { return aldc::cli::run_cli(argc, argv, std::cout, std::cerr); }
