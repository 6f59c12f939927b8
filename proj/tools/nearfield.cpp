#include <iostream>

#include "nearfield/cli.hpp"

int main(int argc, char** argv) { return nearfield::cli::run(argc, argv, std::cout, std::cerr); }
