#include "hillvallea/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return hillvallea::cli_main(argc, argv, std::cout, std::cerr); }
