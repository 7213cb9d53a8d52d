#include <iostream>

#include "segsolve/cli.hpp"

int main(int argc, char** argv) { return segsolve::run_cli(argc, argv, std::cout, std::cerr); }
