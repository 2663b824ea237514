#include <iostream>

#include "pacmoo/cli.hpp"

int main(int argc, char** argv) { return pacmoo::run_cli(argc, argv, std::cout, std::cerr); }
