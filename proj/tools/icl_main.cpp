#include <iostream>

#include "icl/cli.hpp"

int main(int argc, char** argv) { return icl::run_cli(argc, argv, std::cout, std::cerr); }
