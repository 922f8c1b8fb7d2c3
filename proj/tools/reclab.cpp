#include "reclab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return reclab::run_cli(argc, argv, std::cout, std::cerr); }
