#include <iostream>

#include "dairy/cli.hpp"

int main(int argc, char** argv) { return dairy::cli_main(argc, argv, std::cout, std::cerr); }
