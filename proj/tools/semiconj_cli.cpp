#include <iostream>

#include "semiconj/cli.hpp"

int main(int argc, char** argv) { return semiconj::cli::run(argc, argv, std::cout, std::cerr); }
