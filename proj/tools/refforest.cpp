#include <iostream>

#include "refforest/cli.hpp"

int main(int argc, char** argv) {
  return refforest::run_cli(argc, argv, std::cin, std::cout, std::cerr);
}
