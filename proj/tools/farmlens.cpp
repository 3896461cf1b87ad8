#include <iostream>

#include "farmlens/cli.hpp"

int main(int argc, char** argv) { return farmlens::cli::run(argc, argv, std::cout, std::cerr); }
