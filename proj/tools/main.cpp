#include <iostream>

#include "srforge/cli.hpp"

int main(int argc, char** argv) { return srforge::run_cli(argc, argv, std::cout, std::cerr); }
