#include <iostream>

#include "stabfold/cli.hpp"

int main(int argc, char** argv) { return stabfold::cli_main(argc, argv, std::cout, std::cerr); }
