#include <iostream>

#include "divconv/cli.hpp"

int main(int argc, char** argv) { return divconv::run_cli(argc, argv, std::cout, std::cerr); }
