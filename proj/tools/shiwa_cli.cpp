#include <iostream>

#include "shiwa/cli.hpp"

int main(int argc, char** argv) { return shiwa::run_cli(argc, argv, std::cout, std::cerr); }
