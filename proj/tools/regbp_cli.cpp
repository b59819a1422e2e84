#include <iostream>

#include "regbp/cli.hpp"

int main(int argc, char** argv) { return regbp::run_cli(argc, argv, std::cout, std::cerr); }
