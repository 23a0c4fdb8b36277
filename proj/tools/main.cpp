#include <iostream>

#include "omla/cli.hpp"

int main(int argc, char** argv) { return omla::run_cli(argc, argv, std::cout, std::cerr); }
