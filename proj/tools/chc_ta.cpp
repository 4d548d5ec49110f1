#include "chcta/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return chcta::run_cli(argc, argv, std::cout, std::cerr); }
