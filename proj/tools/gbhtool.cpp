#include <iostream>

#include "gbh/cli.hpp"

int main(int argc, char** argv) { return gbh::run_cli(argc, argv, std::cout, std::cerr); }
