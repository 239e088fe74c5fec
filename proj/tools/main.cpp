#include <iostream>

#include "depmet/cli.hpp"

int main(int argc, char** argv) { return depmet::cli_main(argc, argv, std::cout, std::cerr); }
