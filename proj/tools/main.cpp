#include <iostream>

#include "permorb/cli.hpp"

int main(int argc, char** argv) { return permorb::cli::run(argc, argv, std::cout, std::cerr); }
