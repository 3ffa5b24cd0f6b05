#include <iostream>

#include "locklab/cli.hpp"

int main(int argc, char** argv) { return locklab::cli::run(argc, argv, std::cout, std::cerr); }
