#include <iostream>

#include "vmfbs/cli.hpp"

int main(int argc, char** argv) { return vmfbs::run_cli(argc, argv, std::cout, std::cerr); }
