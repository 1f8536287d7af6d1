#include <iostream>

#include "gammalab/cli/commands.hpp"

int main(int argc, char** argv) {
  return gammalab::cli::main_entry(argc, argv, std::cout, std::cerr);
}
