#include <iostream>

#include "netid/cli.hpp"

int main(int argc, char** argv) { return netid::run_cli(argc, argv, std::cout, std::cerr); }
