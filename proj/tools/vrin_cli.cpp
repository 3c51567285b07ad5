#include <iostream>

#include "vrin/cli.hpp"

int main(int argc, char** argv) { return vrin::run_cli(argc, argv, std::cout, std::cerr); }
