#include <iostream>

#include "spiked/cli.hpp"

int main(int argc, char** argv) { return spiked::cli::run(argc, argv, std::cout, std::cerr); }
