#include <iostream>

#include "mask/cli.hpp"

int main(int argc, char** argv) { return mask::run_cli(argc, argv, std::cout, std::cerr); }
