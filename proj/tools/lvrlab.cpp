#include <iostream>

#include "lvrlab/cli.hpp"

int main(int argc, char** argv) { return lvrlab::run_cli(argc, argv, std::cout, std::cerr); }
