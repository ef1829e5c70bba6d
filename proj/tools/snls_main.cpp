#include "snls/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return snls::run_cli(argc, argv, std::cout, std::cerr); }
